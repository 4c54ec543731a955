use proptest::prelude::*;

use spmf_core::ingest::{
    parse_msr, parse_ntu, read_file, synth_sequence, write_msr, write_ntu, IngestError,
    MsrFormatConfig, NtuFormatConfig, Position, SourceFormat, SynthTemplate,
};
use spmf_core::{validate_sequence, Joint3, SkeletonSequence};

fn joint() -> impl Strategy<Value = Joint3> {
    (-1e3f64..1e3, -1e3f64..1e3, -1e3f64..1e3).prop_map(|(x, y, z)| Joint3::new(x, y, z))
}

fn sequence(j: usize) -> impl Strategy<Value = SkeletonSequence> {
    prop::collection::vec(prop::collection::vec(joint(), j), 1..8)
        .prop_map(|frames| SkeletonSequence::from_joints(frames, 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn msr_round_trip(seq in sequence(20)) {
        let cfg = MsrFormatConfig::default();
        let parsed = parse_msr(&write_msr(&seq, &cfg), &cfg).unwrap();
        for (a, b) in parsed.frames.iter().zip(&seq.frames) {
            prop_assert_eq!(&a.joints, &b.joints);
        }
        let again = parse_msr(&write_msr(&parsed, &cfg), &cfg).unwrap();
        prop_assert_eq!(again, parsed);
    }

    #[test]
    fn ntu_round_trip(a in sequence(25), b in sequence(25)) {
        let cfg = NtuFormatConfig::default();
        let mut a = a;
        let mut b = b;
        a.body_id = Some(72057594037928000);
        b.body_id = Some(7);
        let parsed = parse_ntu(&write_ntu(&[a.clone(), b.clone()], &cfg), &cfg).unwrap();
        prop_assert_eq!(parsed.len(), 2);
        for (p, src) in parsed.iter().zip([&a, &b]) {
            prop_assert_eq!(p.body_id, src.body_id);
            prop_assert_eq!(p.frames.len(), src.frames.len());
            for (x, y) in p.frames.iter().zip(&src.frames) {
                prop_assert_eq!(&x.joints, &y.joints);
            }
        }
        let again = parse_ntu(&write_ntu(&parsed, &cfg), &cfg).unwrap();
        prop_assert_eq!(again, parsed);
    }

    #[test]
    fn parsers_survive_arbitrary_bytes(bytes in prop::collection::vec(any::<u8>(), 0..512)) {
        let text = String::from_utf8_lossy(&bytes);
        let _ = parse_msr(&text, &MsrFormatConfig::default());
        let _ = parse_ntu(&text, &NtuFormatConfig::default());
    }

    #[test]
    fn parsers_survive_numeric_noise(tokens in prop::collection::vec(prop_oneof![
        Just("0".to_string()), Just("1".to_string()), Just("25".to_string()),
        Just("-3".to_string()), Just("nan".to_string()), Just("1e400".to_string()),
        Just("\n".to_string()), Just("18446744073709551616".to_string()),
        (0u32..100).prop_map(|v| v.to_string()),
    ], 0..200)) {
        let text = tokens.join(" ");
        let _ = parse_msr(&text, &MsrFormatConfig::default());
        let _ = parse_ntu(&text, &NtuFormatConfig::default());
    }

    #[test]
    fn synthetic_sequences_validate(seed in any::<u64>(), n in 2usize..30) {
        let t = &SynthTemplate::action_family(3, 20, 0.05, seed)[1];
        let seq = synth_sequence(t, n, seed).unwrap();
        prop_assert!(validate_sequence(&seq).is_valid());
        prop_assert_eq!(seq.len(), n);
    }
}

#[test]
fn synthesis_is_deterministic_and_still_templates_are_constant() {
    let t = &SynthTemplate::action_family(2, 20, 0.05, 1)[0];
    assert_eq!(
        synth_sequence(t, 10, 7).unwrap(),
        synth_sequence(t, 10, 7).unwrap()
    );
    let still = SynthTemplate::still(3, SynthTemplate::body_pose(20, 2), 0.0);
    let s = synth_sequence(&still, 5, 9).unwrap();
    assert!(s.frames.windows(2).all(|w| w[0].joints == w[1].joints));
    assert!(synth_sequence(&still, 1, 9).is_err());
}

#[test]
fn file_errors_carry_path_and_position() {
    let dir = tempfile::tempdir().unwrap();
    let msr = dir.path().join("a01_s02_e03_skeleton3D.txt");
    std::fs::write(&msr, "0 0 0 1\n".repeat(30)).unwrap();
    let msr_cfg = MsrFormatConfig::default();
    let ntu_cfg = NtuFormatConfig::default();
    match read_file(&msr, SourceFormat::Msr, &msr_cfg, &ntu_cfg) {
        Err(e @ IngestError::Format { .. }) => {
            let text = e.to_string();
            assert!(text.contains("a01_s02_e03_skeleton3D.txt"), "{text}");
            assert!(text.contains("row count 30 not divisible by 20"), "{text}");
        }
        other => panic!("{other:?}"),
    }

    let ntu = dir.path().join("S001C002P003R002A013.skeleton");
    std::fs::write(&ntu, "2\n1\n5 0 0 0 0 0 0 0 0 0\n25\n").unwrap();
    match read_file(&ntu, SourceFormat::Ntu, &msr_cfg, &ntu_cfg) {
        Err(IngestError::Format { position, path, .. }) => {
            assert!(matches!(position, Position::Byte(_)));
            assert_eq!(path.as_deref(), Some(ntu.as_path()));
        }
        other => panic!("{other:?}"),
    }

    let missing = dir.path().join("nope.txt");
    assert!(matches!(
        read_file(&missing, SourceFormat::Msr, &msr_cfg, &ntu_cfg),
        Err(IngestError::Io { .. })
    ));
}

#[test]
fn file_names_supply_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let t = &SynthTemplate::action_family(1, 25, 0.01, 4)[0];
    let mut seq = synth_sequence(t, 3, 1).unwrap();
    seq.body_id = Some(1);
    let path = dir.path().join("S001C002P003R002A013.skeleton");
    std::fs::write(&path, write_ntu(&[seq], &NtuFormatConfig::default())).unwrap();
    let seqs = read_file(
        &path,
        SourceFormat::Ntu,
        &MsrFormatConfig::default(),
        &NtuFormatConfig::default(),
    )
    .unwrap();
    assert_eq!(seqs.len(), 1);
    assert_eq!(
        (seqs[0].label, seqs[0].subject_id, seqs[0].camera_id),
        (13, 3, 2)
    );
    assert_eq!(seqs[0].id, "S001C002P003R002A013");
}
