use ndarray::Array2;
use proptest::prelude::*;
use somm::data::{normalize, split_by_class};
use somm::neighbors::euclidean_distance;
use somm::sampler::{
    somm_oversample, somm_oversample_traced, CandidateStatus, SommConfig, SyntheticCount,
};
use somm::Dataset;

fn dataset() -> impl Strategy<Value = Dataset> {
    (2usize..=3, 4usize..=25, 2usize..=10).prop_flat_map(|(d, n_maj, n_min)| {
        proptest::collection::vec(-5.0f64..5.0, (n_maj + n_min) * d).prop_map(move |v| {
            let labels = (0..n_maj + n_min)
                .map(|i| usize::from(i >= n_maj))
                .collect();
            Dataset::new(
                Array2::from_shape_vec((n_maj + n_min, d), v).unwrap(),
                labels,
            )
            .unwrap()
        })
    })
}

fn config(k: usize, seed: u64) -> SommConfig {
    SommConfig {
        k,
        n_synthetic: SyntheticCount::Exact(6),
        max_attempts_factor: 40,
        seed,
    }
}

proptest! {
    #[test]
    fn synthetics_stay_in_minority_box(data in dataset(), k in 1usize..8, seed in any::<u64>()) {
        let Ok(out) = somm_oversample(&data, 1, &config(k, seed)) else { return Ok(()) };
        let (_, minority) = split_by_class(&data, 1).unwrap();
        for row in out.synthetic.rows() {
            for (f, col) in minority.features().columns().into_iter().enumerate() {
                let lo = col.fold(f64::INFINITY, |a, &b| a.min(b));
                let hi = col.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
                prop_assert!(row[f] >= lo && row[f] <= hi);
            }
        }
    }

    #[test]
    fn retained_candidates_obey_the_rules(data in dataset(), k in 1usize..8, seed in any::<u64>()) {
        let Ok((out, trace)) = somm_oversample_traced(&data, 1, &config(k, seed)) else { return Ok(()) };
        let (norm, _) = normalize(&data).unwrap();
        let retained: Vec<_> = trace.iter().filter(|t| t.retained.is_some()).collect();
        prop_assert_eq!(retained.len(), out.synthetic.nrows());
        prop_assert_eq!(trace.len(), out.attempts_used);
        for t in retained {
            let b = t.neighbors.index_b;
            prop_assert!(b.is_some());
            if t.candidate.status == CandidateStatus::UpdatedRule3 {
                let g = t.geometry.as_ref().unwrap();
                let nn_b = norm.row(t.neighbors.indices[b.unwrap()]).to_vec();
                prop_assert!(euclidean_distance(t.retained.as_ref().unwrap(), &nn_b).unwrap() > 0.0);
                let (lo, hi) = g.magnitude_interval();
                prop_assert!(lo < g.m && g.m < hi);
            }
        }
    }

    #[test]
    fn same_seed_same_output(data in dataset(), seed in any::<u64>()) {
        let a = somm_oversample(&data, 1, &config(3, seed));
        let b = somm_oversample(&data, 1, &config(3, seed));
        prop_assert_eq!(a.ok(), b.ok());
    }
}
