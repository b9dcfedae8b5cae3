mod support;

use facetrait::baseline::{logreg_loss_grad, logreg_train, LogRegConfig, LogRegModel};
use facetrait::mlp::{mlp_loss_grad, mlp_train_traced, MlpArchitecture, MlpModel, MlpTrainConfig};
use facetrait::synthetic::{gaussian_clusters, ClusterSpec};
use proptest::prelude::*;
use rand::RngExt;
use support::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn logistic_gradient_matches_finite_differences(seed in 0u64..100_000, n in 2usize..25, d in 1usize..6, lambda in 0.0f64..1.0) {
        let mut r = rng(seed);
        let data = random_dataset(&mut r, n, d);
        let model = LogRegModel {
            weights: (0..d).map(|_| r.random_range(-1.5..1.5)).collect(),
            bias: r.random_range(-1.0..1.0),
            l2_lambda: lambda,
        };
        let (_, analytic) = logreg_loss_grad(&model, &data).unwrap();
        let mut theta = model.weights.clone();
        theta.push(model.bias);
        let numeric = numeric_gradient(
            |t| {
                let m = LogRegModel { weights: t[..d].to_vec(), bias: t[d], l2_lambda: lambda };
                logreg_loss_grad(&m, &data).unwrap().0
            },
            &theta,
            1e-5,
        );
        prop_assert!(relative_error(&analytic, &numeric) <= 1e-6);
    }

    #[test]
    fn mlp_gradient_matches_finite_differences(seed in 0u64..100_000, n in 2usize..10, d in 1usize..5, width in 1usize..6, depth in 1usize..4) {
        let mut r = rng(seed);
        let data = random_dataset(&mut r, n, d);
        let arch = MlpArchitecture::new(d, vec![width; depth]).unwrap();
        let mut model = MlpModel::initialize(arch, seed);
        let mut params = model.parameters();
        for p in &mut params {
            *p += r.random_range(-0.05..0.05);
        }
        model.set_parameters(&params).unwrap();
        let analytic = mlp_loss_grad(&model, &data).unwrap().1.to_vec();
        let mut probe = model.clone();
        let numeric = numeric_gradient(
            |t| {
                probe.set_parameters(t).unwrap();
                mlp_loss_grad(&probe, &data).unwrap().0
            },
            &params,
            1e-6,
        );
        prop_assert!(relative_error(&analytic, &numeric) <= 1e-5);
    }
}

#[test]
fn logistic_training_reaches_a_stationary_point() {
    let mut r = rng(2);
    let data = random_dataset(&mut r, 60, 3);
    let model = logreg_train(&data, 0.1, &LogRegConfig::default()).unwrap();
    let (_, grad) = logreg_loss_grad(&model, &data).unwrap();
    assert!(grad.iter().all(|g| g.abs() <= 1e-6), "{grad:?}");
}

#[test]
fn mlp_training_lowers_the_loss() {
    let spec = ClusterSpec {
        dimension: 8,
        offset: 0.05,
        sigma: 0.1,
        ..ClusterSpec::default()
    };
    let data = gaussian_clusters(&spec, 200, 1, "t").unwrap();
    let arch = MlpArchitecture::new(8, vec![10]).unwrap();
    let out = mlp_train_traced(
        &data,
        &arch,
        &MlpTrainConfig {
            epochs: 30,
            batch_size: 32,
            step_size: 1e-2,
            ..MlpTrainConfig::default()
        },
    )
    .unwrap();
    assert_eq!(out.loss_trace.len(), 30);
    assert!(out.final_loss < out.initial_loss);
}
