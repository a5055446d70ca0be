use borel_qmt::golden::{check, embedded};

#[test]
fn appendix_tables_match_exactly() {
    for table in embedded() {
        let bad = check(&table).unwrap();
        assert!(bad.is_empty(), "{}", bad.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("\n"));
    }
}
