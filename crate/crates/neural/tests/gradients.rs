//! Gradient correctness against central finite differences, plus the
//! forward-pass and optimizer contracts.

use macrl_neural::{
    backward_sequence, forward_sequence, forward_sequence_cached, NetConfig, Optimizer, Params,
    RecurrentQNet,
};
use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tiny_cfg(input: usize, width: usize, rec: usize, out: usize) -> NetConfig {
    NetConfig {
        input_dim: input,
        pre_widths: vec![width, width],
        recurrent_width: rec,
        post_widths: vec![width, width],
        output_dim: out,
        leaky_slope: 0.01,
    }
}

fn random_inputs(rng: &mut ChaCha8Rng, steps: usize, batch: usize, dim: usize) -> Vec<Array2<f64>> {
    (0..steps)
        .map(|_| Array2::from_shape_fn((batch, dim), |_| rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Linear probe loss sum_t <c_t, q_t> exercises every parameter path; its
/// analytic gradient is backward_sequence with dq = c.
fn probe_loss(cfg: &NetConfig, params: &Params, inputs: &[Array2<f64>], coeffs: &[Array2<f64>]) -> f64 {
    let mut hidden = macrl_neural::Hidden::zeros(inputs[0].nrows(), cfg.recurrent_width);
    let q = forward_sequence(cfg, params, inputs, &mut hidden).unwrap();
    q.iter().zip(coeffs).map(|(qt, ct)| (qt * ct).sum()).sum()
}

#[test]
fn zero_parameters_give_zero_outputs() {
    let cfg = tiny_cfg(3, 4, 4, 2);
    let params = Params::zeros(&cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inputs = random_inputs(&mut rng, 4, 2, 3);
    let mut hidden = macrl_neural::Hidden::zeros(2, cfg.recurrent_width);
    let q = forward_sequence(&cfg, &params, &inputs, &mut hidden).unwrap();
    for qt in q {
        assert!(qt.iter().all(|&v| v == 0.0));
    }
}

#[test]
fn outputs_are_causal() {
    let cfg = tiny_cfg(3, 5, 4, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let net = RecurrentQNet::new(cfg.clone(), &mut rng).unwrap();
    let mut inputs = random_inputs(&mut rng, 5, 2, 3);
    let mut h1 = net.hidden(2);
    let q1 = net.forward_online(&inputs, &mut h1).unwrap();
    // permuting two later inputs leaves earlier outputs unchanged
    inputs.swap(3, 4);
    let mut h2 = net.hidden(2);
    let q2 = net.forward_online(&inputs, &mut h2).unwrap();
    for t in 0..3 {
        assert_eq!(q1[t], q2[t]);
    }
    assert_ne!(q1[3], q2[3]);
}

#[test]
fn single_step_equals_stateless_evaluation() {
    let cfg = tiny_cfg(3, 4, 4, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let net = RecurrentQNet::new(cfg, &mut rng).unwrap();
    let inputs = random_inputs(&mut rng, 1, 1, 3);
    let mut h = net.hidden(1);
    let q_seq = net.forward_online(&inputs, &mut h).unwrap();
    let q_step = net
        .value_step(inputs[0].row(0).as_slice().unwrap(), &mut net.hidden(1))
        .unwrap();
    assert_eq!(q_seq[0].row(0).to_vec(), q_step);
}

#[test]
fn zero_loss_gradients_give_zero_parameter_gradients() {
    let cfg = tiny_cfg(3, 4, 4, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let net = RecurrentQNet::new(cfg.clone(), &mut rng).unwrap();
    let inputs = random_inputs(&mut rng, 4, 2, 3);
    let mut hidden = net.hidden(2);
    let (_, cache) = net.forward_online_cached(&inputs, &mut hidden).unwrap();
    let dq: Vec<Array2<f64>> = (0..4).map(|_| Array2::zeros((2, 2))).collect();
    let grads = net.backward(&cache, &dq);
    assert!(grads.flat().iter().all(|&g| g == 0.0));
}

#[test]
fn gradients_match_central_finite_differences() {
    // h small enough that leaky-rectifier kink crossings (which invalidate
    // the finite difference, not the analytic gradient) stay rare; the 99%
    // bound absorbs the survivors, aggregated over the random nets.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-6;
    let mut ok = 0usize;
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for _trial in 0..3 {
        let cfg = tiny_cfg(
            rng.gen_range(2..4),
            rng.gen_range(2..=8),
            rng.gen_range(2..=8),
            rng.gen_range(2..4),
        );
        let steps = rng.gen_range(2..=5);
        let batch = rng.gen_range(1..=3);
        let net = RecurrentQNet::new(cfg.clone(), &mut rng).unwrap();
        let inputs = random_inputs(&mut rng, steps, batch, cfg.input_dim);
        let coeffs: Vec<Array2<f64>> = (0..steps)
            .map(|_| Array2::from_shape_fn((batch, cfg.output_dim), |_| rng.gen_range(-1.0..1.0)))
            .collect();

        let mut hidden = net.hidden(batch);
        let (_, cache) = net.forward_online_cached(&inputs, &mut hidden).unwrap();
        let analytic = backward_sequence(&cfg, &net.online, &cache, &coeffs).flat();

        let base = net.online.flat();
        let n = base.len();
        for idx in 0..n {
            let mut plus = net.online.clone();
            let mut minus = net.online.clone();
            let mut vp = base.clone();
            let mut vm = base.clone();
            vp[idx] += h;
            vm[idx] -= h;
            plus.assign_flat(&vp);
            minus.assign_flat(&vm);
            let fd = (probe_loss(&cfg, &plus, &inputs, &coeffs)
                - probe_loss(&cfg, &minus, &inputs, &coeffs))
                / (2.0 * h);
            let denom = analytic[idx].abs().max(fd.abs()).max(1e-6);
            let rel = (analytic[idx] - fd).abs() / denom;
            worst = worst.max(rel);
            checked += 1;
            if rel < 1e-4 {
                ok += 1;
            }
        }
    }
    let frac = ok as f64 / checked as f64;
    assert!(
        frac >= 0.99,
        "only {frac:.4} of {checked} parameters within 1e-4 (worst {worst:e})"
    );
}

#[test]
fn probe_set_of_ten_parameters_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cfg = tiny_cfg(3, 6, 6, 3);
    let net = RecurrentQNet::new(cfg.clone(), &mut rng).unwrap();
    let inputs = random_inputs(&mut rng, 4, 2, 3);
    let coeffs: Vec<Array2<f64>> = (0..4)
        .map(|_| Array2::from_shape_fn((2, 3), |_| rng.gen_range(-1.0..1.0)))
        .collect();
    let mut hidden = net.hidden(2);
    let (_, cache) = net.forward_online_cached(&inputs, &mut hidden).unwrap();
    let analytic = backward_sequence(&cfg, &net.online, &cache, &coeffs).flat();

    let base = net.online.flat();
    let h = 1e-5;
    let n = base.len();
    for probe in 0..10 {
        let idx = (probe * n) / 10;
        let mut vp = base.clone();
        let mut vm = base.clone();
        vp[idx] += h;
        vm[idx] -= h;
        let mut plus = net.online.clone();
        let mut minus = net.online.clone();
        plus.assign_flat(&vp);
        minus.assign_flat(&vm);
        let fd = (probe_loss(&cfg, &plus, &inputs, &coeffs)
            - probe_loss(&cfg, &minus, &inputs, &coeffs))
            / (2.0 * h);
        let denom = analytic[idx].abs().max(fd.abs()).max(1e-6);
        assert!(
            (analytic[idx] - fd).abs() / denom < 1e-4,
            "param {idx}: analytic {} vs fd {fd}",
            analytic[idx]
        );
    }
}

#[test]
fn overfit_one_batch_drives_loss_down() {
    let cfg = tiny_cfg(3, 8, 8, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut net = RecurrentQNet::new(cfg.clone(), &mut rng).unwrap();
    let inputs = random_inputs(&mut rng, 4, 2, 3);
    let targets: Vec<Array2<f64>> = (0..4)
        .map(|_| Array2::from_shape_fn((2, 2), |_| rng.gen_range(-1.0..1.0)))
        .collect();
    let mut opt = Optimizer::adam(6e-3, net.online.n_params());

    let mut losses = Vec::new();
    for _ in 0..200 {
        let mut hidden = net.hidden(2);
        let (q, cache) = net.forward_online_cached(&inputs, &mut hidden).unwrap();
        let count = (4 * 2 * 2) as f64;
        let mut loss = 0.0;
        let dq: Vec<Array2<f64>> = q
            .iter()
            .zip(&targets)
            .map(|(qt, yt)| {
                let diff = qt - yt;
                loss += diff.mapv(|d| d * d).sum();
                diff.mapv(|d| 2.0 * d / count)
            })
            .collect();
        losses.push(loss / count);
        let grads = net.backward(&cache, &dq);
        opt.step(&mut net.online, &grads, 1.0).unwrap();
    }
    let ratio = losses.last().unwrap() / losses[0];
    assert!(ratio < 1e-3, "loss ratio {ratio}");
    for w in losses.windows(2) {
        assert!(w[1] <= w[0], "loss increased: {} -> {}", w[0], w[1]);
    }
}

#[test]
fn masked_positions_contribute_no_gradient() {
    // zeroing dq beyond a trace's real length gives exactly the gradients of
    // the truncated sequence
    let cfg = tiny_cfg(3, 4, 4, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let net = RecurrentQNet::new(cfg.clone(), &mut rng).unwrap();
    let inputs = random_inputs(&mut rng, 5, 1, 3);
    let coeffs: Vec<Array2<f64>> = (0..3)
        .map(|_| Array2::from_shape_fn((1, 2), |_| rng.gen_range(-1.0..1.0)))
        .collect();

    let mut hidden = net.hidden(1);
    let (_, cache_full) = net.forward_online_cached(&inputs, &mut hidden).unwrap();
    let mut dq_full: Vec<Array2<f64>> = coeffs.clone();
    dq_full.push(Array2::zeros((1, 2)));
    dq_full.push(Array2::zeros((1, 2)));
    let grads_padded = net.backward(&cache_full, &dq_full).flat();

    let mut hidden = net.hidden(1);
    let (_, cache_trunc) = net
        .forward_online_cached(&inputs[..3], &mut hidden)
        .unwrap();
    let grads_trunc = net.backward(&cache_trunc, &coeffs).flat();

    for (a, b) in grads_padded.iter().zip(&grads_trunc) {
        assert_eq!(a, b);
    }
}

#[test]
fn dimension_mismatch_is_rejected() {
    let cfg = tiny_cfg(3, 4, 4, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let net = RecurrentQNet::new(cfg, &mut rng).unwrap();
    let bad = vec![Array2::<f64>::zeros((1, 7))];
    assert!(net.forward_online(&bad, &mut net.hidden(1)).is_err());
}

#[test]
fn cached_and_plain_forward_agree() {
    let cfg = tiny_cfg(4, 5, 6, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let net = RecurrentQNet::new(cfg.clone(), &mut rng).unwrap();
    let inputs = random_inputs(&mut rng, 6, 3, 4);
    let mut h1 = net.hidden(3);
    let mut h2 = net.hidden(3);
    let plain = forward_sequence(&cfg, &net.online, &inputs, &mut h1).unwrap();
    let (cached, _) = forward_sequence_cached(&cfg, &net.online, &inputs, &mut h2).unwrap();
    assert_eq!(plain, cached);
    assert_eq!(h1, h2);
}
