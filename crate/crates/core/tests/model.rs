use ppg2ecg::model::{
    attention_gate, Discriminator, DiscriminatorConfig, Generator, GeneratorConfig, Graph, Init, ParamSpec,
    ParameterSet, Tensor,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::{gradient_check, tiny_discriminator, tiny_generator};

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

fn random_tensor(shape: &[usize], rng: &mut ChaCha8Rng, scale: f64) -> Tensor {
    let n = shape.iter().product();
    Tensor::new(shape.to_vec(), (0..n).map(|_| rng.gen_range(-scale..scale)).collect()).unwrap()
}

fn gate_params(channels: usize, inter: usize, rng: &mut ChaCha8Rng) -> ParameterSet {
    let shapes = [
        ("t.skip.w", vec![inter, channels, 1]),
        ("t.skip.b", vec![inter]),
        ("t.gating.w", vec![inter, channels, 1]),
        ("t.gating.b", vec![inter]),
        ("t.psi.w", vec![1, inter, 1]),
        ("t.psi.b", vec![1]),
    ];
    let (names, tensors) = shapes
        .iter()
        .map(|(n, s)| (n.to_string(), random_tensor(s, rng, 1.0)))
        .unzip();
    ParameterSet::from_parts(names, tensors)
}

fn run_gate(params: &ParameterSet, skip: &Tensor, gating: &Tensor) -> (Tensor, Tensor) {
    let mut g = Graph::new();
    let p = params.bind(&mut g, false);
    let s = g.input(skip.clone(), false);
    let q = g.input(gating.clone(), false);
    let (out, alpha) = attention_gate(&mut g, &p, "t", s, q).unwrap();
    (g.value(out).clone(), g.value(alpha).clone())
}

#[test]
fn attention_gate_matches_scalar_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (b, c, l, inter) = (2, 4, 8, 2);
    let params = gate_params(c, inter, &mut rng);
    let skip = random_tensor(&[b, c, l], &mut rng, 1.0);
    let gating = random_tensor(&[b, c, l], &mut rng, 1.0);
    let (out, _) = run_gate(&params, &skip, &gating);

    let w = |n: &str| &params.get(n).unwrap().data;
    let (ws, bs, wg, bg, wp, bp) = (w("t.skip.w"), w("t.skip.b"), w("t.gating.w"), w("t.gating.b"), w("t.psi.w"), w("t.psi.b"));
    let at = |t: &Tensor, bi: usize, ci: usize, li: usize| t.data[(bi * c + ci) * l + li];
    for bi in 0..b {
        for li in 0..l {
            let mut psi = bp[0];
            for k in 0..inter {
                let mut q = bs[k] + bg[k];
                for ci in 0..c {
                    q += ws[k * c + ci] * at(&skip, bi, ci, li);
                    q += wg[k * c + ci] * at(&gating, bi, ci, li);
                }
                psi += wp[k] * q.max(0.0);
            }
            let alpha = sigmoid(psi);
            for ci in 0..c {
                let expected = at(&skip, bi, ci, li) * alpha;
                let got = at(&out, bi, ci, li);
                assert!((expected - got).abs() <= 1e-12 * expected.abs().max(1.0), "{expected} vs {got}");
            }
        }
    }
}

#[test]
fn attention_saturation() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut params = gate_params(4, 2, &mut rng);
    let skip = random_tensor(&[2, 4, 8], &mut rng, 1.0);
    let gating = random_tensor(&[2, 4, 8], &mut rng, 1.0);

    params.get_mut("t.psi.w").unwrap().data.fill(0.0);
    params.get_mut("t.psi.b").unwrap().data.fill(1e3);
    let (out, alpha) = run_gate(&params, &skip, &gating);
    assert!(alpha.data.iter().all(|&a| a == 1.0));
    assert_eq!(out, skip);

    params.get_mut("t.psi.b").unwrap().data.fill(-1e3);
    let (out, _) = run_gate(&params, &skip, &gating);
    assert!(out.data.iter().all(|&v| v == 0.0));
}

#[test]
fn attention_coefficients_stay_in_unit_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut probes = 0;
    while probes < 10_000 {
        let params = gate_params(4, 2, &mut rng);
        let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
        let skip = random_tensor(&[2, 4, 25], &mut rng, scale);
        let gating = random_tensor(&[2, 4, 25], &mut rng, scale);
        let (out, alpha) = run_gate(&params, &skip, &gating);
        assert_eq!(out.shape, skip.shape);
        assert!(alpha.data.iter().all(|a| (0.0..=1.0).contains(a)));
        probes += alpha.numel();
    }
}

#[test]
fn attention_rejects_misaligned_gating() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let params = gate_params(4, 2, &mut rng);
    let mut g = Graph::new();
    let p = params.bind(&mut g, false);
    let s = g.input(Tensor::zeros(&[1, 4, 8]), false);
    let q = g.input(Tensor::zeros(&[1, 4, 4]), false);
    assert!(attention_gate(&mut g, &p, "t", s, q).is_err());
    let q = g.input(Tensor::zeros(&[1, 3, 8]), false);
    assert!(attention_gate(&mut g, &p, "t", s, q).is_err());
}

#[test]
fn single_conv_parameter_count() {
    let spec = [
        ParamSpec::new("w", vec![64, 1, 16], Init::Normal(0.02)),
        ParamSpec::new("b", vec![64], Init::Zeros),
    ];
    assert_eq!(spec.iter().map(ParamSpec::numel).sum::<usize>(), 1088);
}

/// Independent tally of the generator layout.
fn generator_count_by_hand(f: &[usize], k: usize, gates: bool) -> usize {
    let conv = |cin: usize, cout: usize, k: usize| k * cin * cout + cout;
    let n = f.len();
    let mut total = 0;
    let mut cin = 1;
    for &c in f {
        total += conv(cin, c, k) + 2 * c;
        cin = c;
    }
    for j in (2..=n).rev() {
        let cin = if j == n { f[n - 1] } else { 2 * f[j - 1] };
        let cout = f[j - 2];
        total += conv(cin, cout, k) + 2 * cout;
        if gates {
            let inter = (cout / 2).max(1);
            total += 2 * conv(cout, inter, 1) + conv(inter, 1, 1);
        }
    }
    total + conv(if n == 1 { f[0] } else { 2 * f[0] }, 1, k)
}

#[test]
fn generator_parameter_count_matches_hand_tally() {
    for (filters, gates) in [
        (vec![64, 128, 256, 512, 512, 512], true),
        (vec![64, 128, 256, 512, 512, 512], false),
        (vec![16, 32, 64], true),
        (vec![2, 2], true),
        (vec![8], true),
    ] {
        let strides = vec![1; filters.len()];
        let c = GeneratorConfig {
            encoder_strides: strides,
            encoder_filters: filters.clone(),
            kernel_size: 16,
            input_length: 512,
            attention_gates: gates,
        };
        assert_eq!(c.parameter_count(), generator_count_by_hand(&filters, 16, gates), "{filters:?}");
    }
}

#[test]
fn doubling_kernel_doubles_conv_weights() {
    let c = DiscriminatorConfig::default();
    let c2 = DiscriminatorConfig { kernel_size: 32, ..c.clone() };
    for (a, b) in c.layout().iter().zip(c2.layout()) {
        if a.name.ends_with(".w") {
            assert_eq!(2 * a.numel(), b.numel());
        } else {
            assert_eq!(a.numel(), b.numel());
        }
    }
}

#[test]
fn discriminator_count_is_sum_of_layers() {
    let c = DiscriminatorConfig::default();
    let mut cin = 1;
    let mut expected = 0;
    for &f in &c.filters {
        expected += 16 * cin * f + f;
        cin = f;
    }
    expected += 16 * cin + 1;
    assert_eq!(c.parameter_count(), expected);
}

#[test]
fn full_size_generator_shapes_and_determinism() {
    let gen = Generator::new(GeneratorConfig::default()).unwrap();
    let a = gen.init_params(42);
    assert_eq!(a, gen.init_params(42));
    let x = Tensor::zeros(&[2, 1, 512]);
    let y = gen.forward(&a, &x).unwrap();
    assert_eq!(y.shape, vec![2, 1, 512]);
    assert!(y.is_finite());
    assert_eq!(y, gen.forward(&a, &x).unwrap());
    assert_eq!(y.item(0), y.item(1));

    let mut g = Graph::new();
    let p = a.bind(&mut g, false);
    let xv = g.input(x, false);
    let trace = gen.forward_graph(&mut g, &p, xv).unwrap();
    let lengths: Vec<usize> = trace.encoder.iter().map(|&v| g.value(v).shape[2]).collect();
    assert_eq!(lengths, vec![256, 128, 64, 64, 64, 64]);
    assert_eq!(trace.attention.len(), 5);
}

#[test]
fn discriminator_standard_config_outputs() {
    let d = Discriminator::new(DiscriminatorConfig::default()).unwrap();
    let p = d.init_params(1);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let y = random_tensor(&[2, 1, 512], &mut rng, 1.0);
    let s = d.forward(&p, &y).unwrap();
    assert!(s.iter().all(|v| *v > 0.0 && *v < 1.0));
    assert!(d.forward(&p, &Tensor::zeros(&[1, 2, 512])).is_err());
}

#[test]
fn generator_gradients_match_finite_differences() {
    let worst = gradient_check(&tiny_generator(), &tiny_discriminator(), 11).unwrap();
    assert!(worst.generator <= 1e-3, "generator worst relative error {}", worst.generator);
    assert!(worst.discriminator <= 1e-3, "discriminator worst relative error {}", worst.discriminator);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn decoder_restores_length(blocks in 1usize..12, batch in 1usize..3) {
        let gen = Generator::new(GeneratorConfig {
            encoder_filters: vec![2, 3, 4, 4],
            encoder_strides: vec![2, 2, 2, 1],
            kernel_size: 16,
            input_length: 8,
            attention_gates: true,
        }).unwrap();
        let p = gen.init_params(0);
        let len = 8 * blocks;
        let y = gen.forward(&p, &Tensor::zeros(&[batch, 1, len])).unwrap();
        prop_assert_eq!(y.shape, vec![batch, 1, len]);
    }
}
