use std::path::Path;

use locsys_core::codec::{decode, encode};

#[test]
fn corpus_documents_round_trip_bit_exactly() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let doc = decode(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(encode(&doc), text, "{}", path.display());
        assert_eq!(decode(&encode(&doc)).unwrap(), doc);
        seen += 1;
    }
    assert!(seen >= 10);
}

#[test]
fn damaged_documents_are_rejected() {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus/regular_c2_f3.json")).unwrap();
    let wrong_version = text.replace("locsys/1", "locsys/0");
    assert!(matches!(decode(&wrong_version), Err(locsys_core::Error::VersionMismatch(_))));
    let truncated = &text[..text.len() / 2];
    assert!(matches!(decode(truncated), Err(locsys_core::Error::Parse { line, .. }) if line > 0));
    // a transport that is not invertible
    let broken = text.replacen("\"1\"", "\"0\"", 1);
    if broken != text {
        assert!(decode(&broken).is_err());
    }
}
