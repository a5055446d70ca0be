pub mod basis;
pub mod error;
pub mod golden;
pub mod perturb1d;
pub mod qmt;
pub mod radial;
pub mod rspt;
pub mod scalar;
pub mod series;
pub mod roots;
pub mod pade;
pub mod quad;
pub mod resum;
pub mod model;
pub mod oracle;
pub mod asymptotics;
pub mod pipeline;
pub mod config;
pub mod figures;
