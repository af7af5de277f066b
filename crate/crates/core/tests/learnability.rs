use conceptmine_core::model::{
    argmax, evaluate, generate, train_eval_split, xor_design, BottleneckConfig, BottleneckModel,
    ClassifierKind, ConceptClassifier, SyntheticConfig, TrainConfig, SYNTHETIC_CLASSES,
};

fn fit_synthetic(seed: u64) -> (f64, f64, f64) {
    let syn = SyntheticConfig {
        seed,
        ..Default::default()
    };
    let data = generate(&syn).unwrap();
    let (train, eval) = train_eval_split(data.len(), 0.2, seed).unwrap();
    let mut model = BottleneckModel::new(
        BottleneckConfig {
            input_dim: syn.features,
            hidden: 32,
            num_concepts: syn.concepts,
            attention_dim: 16,
            num_classes: SYNTHETIC_CLASSES,
            beta: 1.0,
        },
        seed,
    )
    .unwrap();
    let cfg = TrainConfig {
        epochs: 150,
        lr: 3e-3,
        batch_size: 32,
        seed,
    };
    model.fit(&data, &train, &cfg).unwrap();
    let pred = model.predict(&data, &eval).unwrap();
    let yhat: Vec<usize> = pred.classes.iter().map(|p| argmax(p)).collect();
    let truth: Vec<usize> = eval.iter().map(|&r| data.labels[r]).collect();
    let targets: Vec<Vec<f64>> = eval.iter().map(|&r| data.concepts[r].clone()).collect();
    let m = evaluate(&yhat, &truth, &pred.concepts, &targets);
    // ground-truth intervention on every concept
    let hits = eval
        .iter()
        .filter(|&&r| {
            let overrides: Vec<(usize, f64)> =
                data.concepts[r].iter().copied().enumerate().collect();
            argmax(&model.intervene(&data.features[r], &overrides).unwrap()) == data.labels[r]
        })
        .count();
    (
        m.accuracy,
        m.concept_auc.unwrap(),
        hits as f64 / eval.len() as f64,
    )
}

#[test]
fn bottleneck_learns_synthetic_task() {
    let (acc, auc, intervened) = fit_synthetic(0);
    println!("accuracy {acc:.4} concept_auc {auc:.4} intervened {intervened:.4}");
    assert!(acc >= 0.95, "accuracy {acc}");
    assert!(auc >= 0.95, "auc {auc}");
    assert!(intervened >= acc, "intervened {intervened} < {acc}");
}

#[test]
fn mlp_fits_xor_and_linear_cannot() {
    let (xs, ys) = xor_design();
    let rows = [0, 1, 2, 3];
    let cfg = TrainConfig {
        epochs: 2000,
        lr: 0.05,
        batch_size: 4,
        seed: 0,
    };
    let acc = |c: &ConceptClassifier| {
        xs.iter()
            .zip(&ys)
            .filter(|(x, &y)| argmax(&c.predict_proba(x).unwrap()) == y)
            .count() as f64
            / 4.0
    };
    let mut mlp = ConceptClassifier::new(ClassifierKind::Mlp { hidden: 8 }, 2, 2, 0).unwrap();
    mlp.fit(&xs, &ys, &rows, &cfg).unwrap();
    let mut lin = ConceptClassifier::new(ClassifierKind::Linear, 2, 2, 0).unwrap();
    lin.fit(&xs, &ys, &rows, &cfg).unwrap();
    assert_eq!(acc(&mlp), 1.0);
    assert!(acc(&lin) <= 0.75);
}

#[test]
fn zero_epochs_leave_parameters_alone() {
    let data = generate(&SyntheticConfig {
        samples: 20,
        ..Default::default()
    })
    .unwrap();
    let cfg = BottleneckConfig {
        input_dim: 8,
        hidden: 4,
        num_concepts: 8,
        attention_dim: 3,
        num_classes: 4,
        beta: 1.0,
    };
    let mut m = BottleneckModel::new(cfg, 1).unwrap();
    let before = m.clone();
    m.fit(
        &data,
        &[0, 1, 2],
        &TrainConfig {
            epochs: 0,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(m, before);
}

#[test]
fn same_seed_same_trajectory() {
    let data = generate(&SyntheticConfig {
        samples: 100,
        ..Default::default()
    })
    .unwrap();
    let cfg = BottleneckConfig {
        input_dim: 8,
        hidden: 8,
        num_concepts: 8,
        attention_dim: 4,
        num_classes: 4,
        beta: 1.0,
    };
    let rows: Vec<usize> = (0..100).collect();
    let tc = TrainConfig {
        epochs: 3,
        ..Default::default()
    };
    let run = || {
        let mut m = BottleneckModel::new(cfg, 4).unwrap();
        let h = m.fit(&data, &rows, &tc).unwrap();
        (h, m)
    };
    assert_eq!(run(), run());
}
