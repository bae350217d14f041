mod common;

use submanifold::catalog::catalog_entries;
use submanifold::frame::{build_normal_frame, completeness, frame_residuals, induced_metric, tangents};
use submanifold::jet_eval;

#[test]
fn frames_are_orthonormal_complete_and_stable() {
    for entry in catalog_entries() {
        let map = entry.parse();
        let mut eps_seen: Option<Vec<i8>> = None;
        for p in common::sample_points(&map, 100, 3) {
            let t = tangents(&jet_eval(&map, &p).unwrap());
            let g = induced_metric(&t, &map.signature).unwrap();
            assert!(g.inverse_residual() <= 1e-12, "{}: {}", entry.name, g.inverse_residual());
            let frame = build_normal_frame(&t, &g, &map.signature).unwrap();
            assert_eq!(frame.len(), map.codimension());
            let (tangency, orthonormality) = frame_residuals(&t, &frame, &map.signature);
            assert!(tangency <= 1e-10 && orthonormality <= 1e-10, "{} at {p:?}", entry.name);
            assert!(completeness(&t, &frame) > 1e-10, "{} at {p:?}", entry.name);
            let mut eps = frame.eps.clone();
            eps.sort_unstable();
            match &eps_seen {
                Some(seen) => assert_eq!(seen, &eps, "{}", entry.name),
                None => eps_seen = Some(eps),
            }
            let again = build_normal_frame(&t, &g, &map.signature).unwrap();
            for (u, v) in frame.normals.iter().zip(&again.normals) {
                for (a, b) in u.0.iter().zip(&v.0) {
                    assert!(a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| x.to_bits() == y.to_bits()));
                }
            }
        }
    }
}

#[test]
fn induced_signature_matches_catalog() {
    for entry in catalog_entries() {
        let map = entry.parse();
        for p in common::sample_points(&map, 100, 4) {
            let t = tangents(&jet_eval(&map, &p).unwrap());
            let g = induced_metric(&t, &map.signature).unwrap();
            assert_eq!(g.signature(), entry.metric_signature, "{} at {p:?}", entry.name);
        }
    }
}
