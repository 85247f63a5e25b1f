use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use univnc::algebra::{BinaryPoly, Rational};
use univnc::identity::IdRegistry;
use univnc::network::{butterfly, combination, lower_bound, random_dag, LowerBoundMode, Network};
use univnc::sim::{header_frame, header_unframe};
use univnc::szcheck::{random_instance, sz_bound, sz_empirical, sz_exhaustive_counts, SzInstance};
use univnc::transform::VirtualGraph;

use crate::common::ensure;

/// Zero count of `P` over the whole product set, by direct evaluation.
fn oracle_zeros(inst: &SzInstance) -> u64 {
    let sets = inst.sets();
    let mut idx = vec![0usize; sets.len()];
    let mut zeros = 0;
    'outer: loop {
        let x: Vec<Rational> = idx.iter().zip(sets).map(|(&i, s)| s[i].clone()).collect();
        zeros += u64::from(inst.eval(&x).is_zero());
        for (k, i) in idx.iter_mut().enumerate() {
            *i += 1;
            if *i < sets[k].len() {
                continue 'outer;
            }
            *i = 0;
        }
        return zeros;
    }
}

pub fn schwartz_zippel() -> Result<String, String> {
    let trials = 2000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mixed = 0;
    let mut with_roots = 0;
    for k in 0..200 {
        let inst = random_instance(&mut rng, 4, 3, &[2, 4, 8]);
        ensure!(inst.vars() <= 4 && inst.degrees().iter().all(|&d| d <= 3), "instance {k} out of range");
        let total: u64 = inst.sets().iter().map(|s| s.len() as u64).product();
        let zeros = oracle_zeros(&inst);
        ensure!(sz_exhaustive_counts(&inst) == Ok((zeros, total)), "instance {k}: exhaustive count disagrees");
        // zeros/total <= sum d_i/|S_i|, cleared of denominators.
        let scaled: u64 = inst.degrees().iter().zip(inst.sets()).map(|(&d, s)| u64::from(d) * (total / s.len() as u64)).sum();
        ensure!(zeros <= scaled, "instance {k}: {zeros}/{total} exceeds the bound {}", sz_bound(&inst));
        let p = zeros as f64 / total as f64;
        let emp = sz_empirical(&inst, trials, k).map_err(|e| e.to_string())?;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        ensure!((emp - p).abs() <= 4.0 * sigma + 1.0 / trials as f64, "instance {k}: empirical {emp} far from exact {p}");
        mixed += usize::from(inst.sets().iter().map(Vec::len).collect::<BTreeSet<_>>().len() > 1);
        with_roots += usize::from(zeros > 0);
    }
    ensure!(mixed > 0, "no instance mixes set sizes");
    Ok(format!("200 instances, 0 violations, {mixed} with mixed set sizes, {with_roots} with roots in the sets"))
}

/// A hundred seeded networks of several families.
fn network_zoo() -> Vec<Network> {
    let mut nets = vec![butterfly()];
    for d in 1..=4 {
        nets.push(lower_bound(d, LowerBoundMode::ManySinks).unwrap());
        nets.push(lower_bound(d, LowerBoundMode::OneSink(0, (1 << d) - 1)).unwrap());
    }
    for (n, k) in [(3, 2), (4, 2), (5, 2), (5, 3), (6, 3)] {
        nets.push(combination(n, k).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut seed = 0;
    while nets.len() < 100 {
        let nodes = rng.gen_range(5..=14);
        let sinks = rng.gen_range(1..=3);
        let p = rng.gen_range(0.2..0.6);
        let cut = rng.gen_range(1..=3);
        nets.push(random_dag(seed, nodes, p, sinks, cut).unwrap());
        seed += 1;
    }
    nets
}

pub fn transform_invariants() -> Result<String, String> {
    let nets = network_zoo();
    let mut vnodes = 0;
    for (i, net) in nets.iter().enumerate() {
        let vg = VirtualGraph::transform(net);
        let dv = vg.degree_violations();
        ensure!(dv.is_empty(), "network {i}: degree violations {dv:?}");
        let pv = vg.path_violations();
        ensure!(pv.is_empty(), "network {i}: path violations {pv:?}");
        let want: BTreeSet<(String, usize)> = net.min_cut().per_sink.into_iter().map(|c| (c.sink, c.value)).collect();
        let got: BTreeSet<(String, usize)> = vg.sink_cuts().into_iter().collect();
        ensure!(want == got, "network {i}: min-cut {want:?} became {got:?}");
        vnodes += vg.node_count();
    }
    Ok(format!("{} networks ({vnodes} virtual nodes), 0 violations, every sink cut preserved", nets.len()))
}

pub fn id_protocol() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut assigned = 0;
    for seq in 0..1000 {
        let len = rng.gen_range(1..=200);
        let mut reg: IdRegistry<usize> = univnc::identity::assign_ids(&0, &[0], &[]);
        for k in 1..=len {
            let parent = rng.gen_range(0..k);
            reg.assign_new(&parent, k).map_err(|e| e.to_string())?;
        }
        let ids = reg.ids();
        let distinct: BTreeSet<&str> = ids.iter().map(|i| i.bits()).collect();
        ensure!(distinct.len() == ids.len(), "sequence {seq}: repeated ID");
        ensure!(reg.is_prefix_free(), "sequence {seq}: not prefix-free");
        assigned += ids.len();
    }
    // Worst case: a chain in which every node joins under the newest one.
    let mut reg: IdRegistry<usize> = univnc::identity::assign_ids(&0, &[0], &[]);
    let mut lens = vec![reg.id(&0).unwrap().len()];
    for k in 1..=200 {
        lens.push(reg.assign_new(&(k - 1), k).map_err(|e| e.to_string())?.len());
    }
    let steps: BTreeSet<usize> = lens.windows(2).map(|w| w[1] - w[0]).collect();
    ensure!(steps.len() == 1, "chain ID lengths do not grow by a constant step: {steps:?}");
    let step = *steps.iter().next().unwrap();
    ensure!(step > 0, "chain IDs do not grow");
    ensure!(lens[200] <= lens[0] + step * 200, "chain length {} is superlinear", lens[200]);
    let value_bits = reg.id(&200).unwrap().as_int().bits() as usize;
    // At most the leading zero bits of the ID are lost in its value.
    ensure!(value_bits + 2 >= lens[200], "ID value does not grow exponentially");
    Ok(format!(
        "1000 sequences ({assigned} IDs) distinct and prefix-free; chain IDs grow by {step} bits per join, reaching {} bits (values near 2^{value_bits})",
        lens[200]
    ))
}

fn random_gcv(rng: &mut ChaCha8Rng) -> Vec<Rational> {
    (0..rng.gen_range(1..=3))
        .map(|_| {
            let num = BinaryPoly::from_words(vec![rng.gen::<u64>() >> rng.gen_range(0..64)]);
            let den = BinaryPoly::from_words(vec![(rng.gen::<u64>() >> rng.gen_range(40..64)) | 1]);
            Rational::new(num, den).expect("nonzero denominator")
        })
        .collect()
}

pub fn header_framing() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut flips = 0u64;
    let mut detected = 0u64;
    for h in 0..10_000 {
        let gcv = random_gcv(&mut rng);
        let framed = header_frame(&gcv);
        let (back, offset) = header_unframe(&framed).map_err(|e| format!("header {h}: {e}"))?;
        ensure!(back == gcv && offset == framed.len(), "header {h} does not round-trip");
        // A few payload bits after the header, as on the wire.
        let mut stream = framed.clone();
        stream.extend((0..16).map(|_| rng.gen::<bool>()));
        for i in 0..framed.len() {
            stream[i] = !stream[i];
            match header_unframe(&stream) {
                Err(_) => detected += 1,
                Ok((got, _)) => ensure!(got != gcv, "header {h}: flipping bit {i} went unnoticed"),
            }
            stream[i] = !stream[i];
            flips += 1;
        }
    }
    Ok(format!("10000 headers round-trip; {flips} single-bit flips, {detected} detected as framing errors, the rest decode to a different header"))
}
