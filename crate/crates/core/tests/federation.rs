use fedpnn_core::dataset::{Class, LabeledDataset, ShardingMode};
use fedpnn_core::ecm::Cluster;
use fedpnn_core::federation::{
    self, client_update, deserialize_update, meta_cluster, serialize_update, ClientError, ClientUpdate,
    FederationConfig, FederationError,
};
use fedpnn_core::seed;
use rand::Rng;

/// Two overlapping blobs in four dimensions.
fn blobs(n: usize, seed_value: u64) -> LabeledDataset {
    let mut rng = seed::rng(seed_value);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = if i % 3 == 0 { Class::Positive } else { Class::Negative };
        let base = if class == Class::Positive { 6.0 } else { 3.0 };
        rows.push((0..4).map(|_| base + rng.random_range(-2.5..2.5)).collect());
        labels.push(class);
    }
    LabeledDataset::from_rows(rows, labels).unwrap()
}

fn config(k: usize) -> FederationConfig {
    FederationConfig { num_clients: k, seed: 5, ..FederationConfig::default() }
}

#[test]
fn one_shot_run_produces_a_full_report() {
    let ds = blobs(300, 1);
    let run = federation::simulate(&ds, &config(3)).unwrap();
    let report = &run.report;
    assert_eq!(report.clients.len(), 3);
    assert_eq!(report.messages, 6);
    assert_eq!(report.server.reserve_rows, 30);
    for c in &report.clients {
        assert!((0.0..=1.0).contains(&c.local_auc));
        assert!((0.0..=1.0).contains(&c.global_auc));
        assert!(c.local_centers.total() >= 1);
        assert_eq!(c.train_rows + c.test_rows, c.shard_rows);
    }
    assert!(report.server.auc > 0.8, "{}", report.to_text());

    let uploaded: u64 = run.client_updates.iter().map(|u| u.total_frequency().iter().sum::<u64>()).sum();
    let meta: u64 = run.meta_clusters.iter().map(Cluster::total).sum();
    assert_eq!(uploaded, meta);
    let train_rows: usize = report.clients.iter().map(|c| c.train_rows).sum();
    assert_eq!(meta, train_rows as u64);
    assert!(run.meta_clusters.iter().all(|c| c.radius <= report.config.server_dthr));

    let text = report.to_text();
    assert!(text.contains("client_2"));
    assert!(text.lines().any(|l| l.starts_with("server")));
}

#[test]
fn runs_are_deterministic() {
    let ds = blobs(200, 2);
    let cfg = FederationConfig { client_sharding: ShardingMode::Stratified, ..config(2) };
    let a = federation::run_one_shot(&ds, &cfg).unwrap();
    let b = federation::run_one_shot(&ds, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_text(), b.to_text());
}

#[test]
fn single_client_with_tiny_server_threshold_is_identity() {
    let ds = blobs(200, 3);
    let cfg = FederationConfig { server_dthr: 1e-6, ..config(1) };
    let run = federation::simulate(&ds, &cfg).unwrap();
    // meta radii start over at zero; positions and counts carry through unchanged
    let strip = |cs: &[Cluster]| cs.iter().map(|c| (c.center.clone(), c.freq)).collect::<Vec<_>>();
    assert_eq!(strip(&run.meta_clusters), strip(&run.client_updates[0].centers));
    let c = &run.report.clients[0];
    assert!((c.local_auc - c.global_auc).abs() <= 1e-12);
}

#[test]
fn broadcasting_own_centers_keeps_auc() {
    let ds = blobs(120, 4);
    let cfg = config(1);
    let outcome = client_update(0, &ds, &cfg, 11).unwrap();
    let again =
        federation::broadcast_and_reevaluate(&outcome.update.centers, std::slice::from_ref(&outcome.test), cfg.sigma)
            .unwrap();
    assert_eq!(again, vec![outcome.local_auc]);
}

#[test]
fn zero_threshold_client_keeps_every_training_row() {
    let ds = blobs(90, 5);
    let cfg = FederationConfig { client_dthr: 0.0, ..config(1) };
    let outcome = client_update(0, &ds, &cfg, 3).unwrap();
    assert_eq!(outcome.update.centers.len(), outcome.train_rows);
}

#[test]
fn single_class_shard_is_rejected() {
    let rows = (0..10).map(|i| vec![i as f64]).collect();
    let ds = LabeledDataset::from_rows(rows, vec![Class::Negative; 10]).unwrap();
    let err = client_update(0, &ds, &config(1), 0).unwrap_err();
    assert!(matches!(err, ClientError::SingleClass(_)), "{err}");
}

#[test]
fn invalid_config_is_reported_before_any_work() {
    let ds = blobs(60, 6);
    let err = federation::run_one_shot(&ds, &FederationConfig { num_clients: 0, ..config(1) }).unwrap_err();
    assert!(matches!(err, FederationError::Config(_)));
    let err = federation::run_one_shot(&ds, &FederationConfig { server_dthr: 0.0, ..config(1) }).unwrap_err();
    assert!(matches!(err, FederationError::Config(_)));
}

#[test]
fn partition_failures_are_tagged() {
    let ds = blobs(9, 7);
    let err = federation::run_one_shot(&ds, &config(4)).unwrap_err();
    assert!(matches!(err, FederationError::Partition(_)), "{err}");
}

#[test]
fn meta_clustering_adds_frequency_vectors() {
    let a = ClientUpdate::new(1, vec![Cluster::new(vec![0.5, 0.5], 0.01, [3, 1])]).unwrap();
    let b = ClientUpdate::new(0, vec![Cluster::new(vec![0.52, 0.5], 0.0, [0, 4]), Cluster::new(vec![0.9, 0.1], 0.0, [2, 0])])
        .unwrap();
    let meta = meta_cluster(&[a.clone(), b.clone()], 0.05, 2.0).unwrap();
    // client 0 goes first, so its first center seeds the first meta-cluster
    assert_eq!(meta.len(), 2);
    assert_eq!(meta[0].freq, [3, 5]);
    assert_eq!(meta[1].freq, [2, 0]);
    assert!(meta.iter().all(|c| c.radius <= 0.05));

    let identity = meta_cluster(std::slice::from_ref(&b), 1e-9, 2.0).unwrap();
    assert_eq!(identity.len(), b.centers.len());
    for (m, c) in identity.iter().zip(&b.centers) {
        assert_eq!((&m.center, m.freq), (&c.center, c.freq));
    }

    assert!(meta_cluster(&[], 0.1, 2.0).is_err());
    let bad = ClientUpdate::new(2, vec![Cluster::new(vec![0.1], 0.0, [1, 0])]).unwrap();
    assert!(meta_cluster(&[a, bad], 0.1, 2.0).is_err());
}

#[test]
fn server_evaluation_extremes() {
    let meta = vec![Cluster::new(vec![0.1], 0.0, [4, 0]), Cluster::new(vec![0.9], 0.0, [0, 4])];
    let reserve = LabeledDataset::from_rows(
        vec![vec![0.0], vec![0.2], vec![0.8], vec![1.0]],
        vec![Class::Negative, Class::Negative, Class::Positive, Class::Positive],
    )
    .unwrap();
    assert_eq!(federation::server_evaluate(&meta, &reserve, 0.1).unwrap(), 1.0);
    let far = vec![Cluster::new(vec![0.5], 0.0, [4, 0]), Cluster::new(vec![50.0], 0.0, [0, 4])];
    assert_eq!(federation::server_evaluate(&far, &reserve, 0.1).unwrap(), 0.5);
    let one_sided = vec![Cluster::new(vec![0.5], 0.0, [4, 0])];
    assert!(federation::server_evaluate(&one_sided, &reserve, 0.1).is_err());
    assert!(federation::broadcast_and_reevaluate(&one_sided, &[reserve], 0.1).is_err());
}

#[test]
fn wire_roundtrip_of_real_update() {
    let ds = blobs(100, 8);
    let outcome = client_update(4, &ds, &config(1), 1).unwrap();
    let bytes = serialize_update(&outcome.update).unwrap();
    assert_eq!(deserialize_update(&bytes).unwrap(), outcome.update);
}
