//! Randomized algebraic properties that cut across modules: pair-locality,
//! decodability, involutions, construction equivalences, cost accounting,
//! and agreement with the classical per-term oracle on disjoint-output
//! schedules.

use rtwlogic::{
    decode_superposition, decode_term, realized_mask, GateOp, GateSchedule, GeneratorId,
    ReferenceSystem, SplitMix64, StringTerm, Superposition, XnorMode, XnorVariant, XorVariant,
};

fn random_triple(rng: &mut SplitMix64, n_bits: usize) -> (usize, usize, usize) {
    assert!(n_bits >= 3);
    loop {
        let i = rng.below(n_bits as u64) as usize + 1;
        let f = rng.below(n_bits as u64) as usize + 1;
        let h = rng.below(n_bits as u64) as usize + 1;
        if i != f && i != h && f != h {
            return (i, f, h);
        }
    }
}

fn random_op(rng: &mut SplitMix64, n_bits: usize) -> GateOp {
    let unary_only = n_bits < 3;
    match rng.below(if unary_only { 2 } else { 6 }) {
        0 => GateOp::Not {
            h: rng.below(n_bits as u64) as usize + 1,
        },
        1 => GateOp::Clear {
            h: rng.below(n_bits as u64) as usize + 1,
        },
        n => {
            let (i, f, h) = random_triple(rng, n_bits);
            match n {
                2 | 3 => GateOp::Xor {
                    i,
                    f,
                    h,
                    variant: if n == 2 {
                        XorVariant::Ones
                    } else {
                        XorVariant::Zeros
                    },
                },
                _ => GateOp::Xnor {
                    i,
                    f,
                    h,
                    mode: if n == 4 {
                        XnorMode::Direct
                    } else {
                        XnorMode::ViaNot
                    },
                    variant: if rng.flip() {
                        XnorVariant::Standard
                    } else {
                        XnorVariant::Alternate
                    },
                },
            }
        }
    }
}

fn random_schedule(rng: &mut SplitMix64, n_bits: usize, max_len: u64) -> GateSchedule {
    (0..rng.below(max_len + 1))
        .map(|_| random_op(rng, n_bits))
        .collect()
}

fn random_superposition(rng: &mut SplitMix64, n_bits: usize, max_total: u64) -> Superposition {
    let space = 1u64 << n_bits.min(62);
    let max_total = max_total.min(space);
    let distinct = rng.below(max_total.min(8)) + 1;
    let mut counts = Vec::new();
    let mut used = std::collections::BTreeSet::new();
    let mut budget = max_total;
    for _ in 0..distinct {
        if budget == 0 {
            break;
        }
        let value = loop {
            let v = rng.below(space);
            if used.insert(v) {
                break v;
            }
        };
        let mult = rng.below(budget.min(4)) + 1;
        budget -= mult;
        counts.push((value, mult));
    }
    Superposition::from_counts(n_bits, &counts).unwrap()
}

#[test]
fn gates_preserve_pair_locality_of_wires() {
    let mut rng = SplitMix64::new(0x10c4);
    for _ in 0..300 {
        let n_bits = rng.below(6) as usize + 3;
        let mut sys = ReferenceSystem::new(n_bits, rng.next_u64()).unwrap();
        random_schedule(&mut rng, n_bits, 6)
            .apply(&mut sys)
            .unwrap();
        for (id, mask) in sys.wires() {
            for significance in 1..=n_bits {
                let (zero_bit, one_bit) = mask.pair_bits(significance);
                let parity = usize::from(zero_bit) + usize::from(one_bit);
                if significance == id.significance() {
                    assert_eq!(parity % 2, 1, "home pair parity must stay odd");
                } else {
                    assert_eq!(parity % 2, 0, "foreign pair parity must stay even");
                }
            }
        }
    }
}

#[test]
fn every_string_stays_decodable_under_gate_schedules() {
    let mut rng = SplitMix64::new(0xdec0de);
    for _ in 0..300 {
        let n_bits = rng.below(6) as usize + 3;
        let mut sys = ReferenceSystem::new(n_bits, rng.next_u64()).unwrap();
        random_schedule(&mut rng, n_bits, 8)
            .apply(&mut sys)
            .unwrap();
        let term = StringTerm::from_number(rng.below(1 << n_bits), n_bits).unwrap();
        let mask = realized_mask(&term, &sys).unwrap();
        for significance in 1..=n_bits {
            let (zero_bit, one_bit) = mask.pair_bits(significance);
            assert_ne!(zero_bit, one_bit, "exactly one generator per pair");
        }
        decode_term(&term, &sys).unwrap();
    }
}

#[test]
fn xor_variants_agree_on_realized_masks() {
    let mut rng = SplitMix64::new(0x0a0b);
    for _ in 0..400 {
        let n_bits = rng.below(6) as usize + 3;
        let seed = rng.next_u64();
        let prior = random_schedule(&mut rng, n_bits, 3);
        let (i, f, h) = random_triple(&mut rng, n_bits);

        let mut ones = ReferenceSystem::new(n_bits, seed).unwrap();
        prior.apply(&mut ones).unwrap();
        let mut zeros = ones.clone();
        ones.xor_gate(i, f, h, XorVariant::Ones).unwrap();
        zeros.xor_gate(i, f, h, XorVariant::Zeros).unwrap();

        for value in 0..(1u64 << n_bits.min(6)) {
            let term = StringTerm::from_number(value, n_bits).unwrap();
            assert_eq!(
                realized_mask(&term, &ones).unwrap(),
                realized_mask(&term, &zeros).unwrap(),
            );
        }
    }
}

#[test]
fn xnor_constructions_agree_on_realized_masks() {
    let mut rng = SplitMix64::new(0x0b0c);
    for _ in 0..400 {
        let n_bits = rng.below(6) as usize + 3;
        let seed = rng.next_u64();
        let prior = random_schedule(&mut rng, n_bits, 3);
        let (i, f, h) = random_triple(&mut rng, n_bits);

        let mut standard = ReferenceSystem::new(n_bits, seed).unwrap();
        prior.apply(&mut standard).unwrap();
        let mut alternate = standard.clone();
        let mut via_not = standard.clone();
        standard
            .xnor_gate(i, f, h, XnorMode::Direct, XnorVariant::Standard)
            .unwrap();
        alternate
            .xnor_gate(i, f, h, XnorMode::Direct, XnorVariant::Alternate)
            .unwrap();
        via_not
            .xnor_gate(i, f, h, XnorMode::ViaNot, XnorVariant::Standard)
            .unwrap();

        for value in 0..(1u64 << n_bits.min(6)) {
            let term = StringTerm::from_number(value, n_bits).unwrap();
            let reference = realized_mask(&term, &standard).unwrap();
            assert_eq!(reference, realized_mask(&term, &alternate).unwrap());
            assert_eq!(reference, realized_mask(&term, &via_not).unwrap());
        }
    }
}

#[test]
fn gates_are_wire_level_involutions() {
    let mut rng = SplitMix64::new(0x1111);
    for _ in 0..300 {
        let n_bits = rng.below(6) as usize + 3;
        let mut sys = ReferenceSystem::new(n_bits, rng.next_u64()).unwrap();
        random_schedule(&mut rng, n_bits, 4)
            .apply(&mut sys)
            .unwrap();
        let before = sys.snapshot();
        let op = random_op(&mut rng, n_bits);
        // ViaNot composes xor+not, which is still an involution, but keep
        // the direct constructions in the mix too.
        let sched = GateSchedule::new(vec![op, op]);
        sched.apply(&mut sys).unwrap();
        assert_eq!(sys.snapshot(), before, "double {op} must restore wires");
    }
}

#[test]
fn snapshot_of_fresh_system_equals_snapshot_after_xor_twice() {
    let sys = ReferenceSystem::new(4, 77).unwrap();
    let fresh = sys.snapshot();
    let mut mutated = sys;
    mutated.xor_gate(2, 3, 1, XorVariant::Ones).unwrap();
    mutated.xor_gate(2, 3, 1, XorVariant::Ones).unwrap();
    assert_eq!(mutated.snapshot(), fresh);
}

#[test]
fn xor_is_symmetric_in_its_inputs() {
    let mut rng = SplitMix64::new(0x2222);
    for _ in 0..200 {
        let n_bits = rng.below(6) as usize + 3;
        let seed = rng.next_u64();
        let (i, f, h) = random_triple(&mut rng, n_bits);
        let mut a = ReferenceSystem::new(n_bits, seed).unwrap();
        let mut b = ReferenceSystem::new(n_bits, seed).unwrap();
        a.xor_gate(i, f, h, XorVariant::Ones).unwrap();
        b.xor_gate(f, i, h, XorVariant::Ones).unwrap();
        assert_eq!(a.snapshot(), b.snapshot());
        assert_eq!(a.mul_counter(), b.mul_counter());
    }
}

#[test]
fn wire_multiplications_commute_within_a_gate() {
    // An XOR gate is one pair product applied to three wires; any order of
    // those three multiplications must land on the same wire table.
    let mut rng = SplitMix64::new(0x3333);
    for _ in 0..100 {
        let n_bits = rng.below(6) as usize + 3;
        let seed = rng.next_u64();
        let (i, f, h) = random_triple(&mut rng, n_bits);
        let wires = [
            GeneratorId::new(h, 1).unwrap(),
            GeneratorId::new(i, 1).unwrap(),
            GeneratorId::new(f, 1).unwrap(),
        ];
        let orders: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let mut tables = Vec::new();
        for order in orders {
            let mut sys = ReferenceSystem::new(n_bits, seed).unwrap();
            let p = sys.pair_product(h).unwrap();
            for &slot in &order {
                sys.multiply_wire(wires[slot], &p).unwrap();
            }
            tables.push(sys.snapshot());
        }
        assert!(tables.windows(2).all(|w| w[0] == w[1]));
    }
}

#[test]
fn gate_cost_is_independent_of_superposition_size() {
    let mut rng = SplitMix64::new(0x4444);
    for _ in 0..50 {
        let n_bits = rng.below(6) as usize + 3;
        let sup = random_superposition(&mut rng, n_bits, 32);
        let mut sys = ReferenceSystem::new(n_bits, rng.next_u64()).unwrap();
        let (i, f, h) = random_triple(&mut rng, n_bits);

        let at_start = sys.mul_counter();
        sys.xor_gate(i, f, h, XorVariant::Ones).unwrap();
        assert_eq!(sys.mul_counter() - at_start, 4);

        let at_xnor = sys.mul_counter();
        sys.xnor_gate(i, f, h, XnorMode::Direct, XnorVariant::Standard)
            .unwrap();
        assert_eq!(sys.mul_counter() - at_xnor, 4);

        let at_not = sys.mul_counter();
        sys.not_gate(h).unwrap();
        assert_eq!(sys.mul_counter() - at_not, 3);

        let at_clear = sys.mul_counter();
        sys.clear_bit(i).unwrap();
        assert_eq!(sys.mul_counter() - at_clear, 2);

        // The superposition riding on the system is irrelevant to the cost
        // but must remain decodable.
        decode_superposition(&sup, &sys).unwrap();
    }
}

#[test]
fn single_application_truth_tables_hold_for_every_triple() {
    let classical = |value: u64, i: usize, f: usize, h: usize, xnor: bool| {
        let bit = u64::from(xnor) ^ (value >> (i - 1) & 1) ^ (value >> (f - 1) & 1);
        (value & !(1 << (h - 1))) | bit << (h - 1)
    };

    // Exhaustive: every distinct triple and every assignment for N = 3, 4.
    for n_bits in 3..=4usize {
        for i in 1..=n_bits {
            for f in 1..=n_bits {
                for h in 1..=n_bits {
                    if i == f || i == h || f == h {
                        continue;
                    }
                    let mut xor_sys = ReferenceSystem::new(n_bits, 5).unwrap();
                    let mut xnor_sys = ReferenceSystem::new(n_bits, 5).unwrap();
                    xor_sys.xor_gate(i, f, h, XorVariant::Ones).unwrap();
                    xnor_sys
                        .xnor_gate(i, f, h, XnorMode::Direct, XnorVariant::Standard)
                        .unwrap();
                    for value in 0..(1u64 << n_bits) {
                        let term = StringTerm::from_number(value, n_bits).unwrap();
                        assert_eq!(
                            decode_term(&term, &xor_sys).unwrap(),
                            classical(value, i, f, h, false)
                        );
                        assert_eq!(
                            decode_term(&term, &xnor_sys).unwrap(),
                            classical(value, i, f, h, true)
                        );
                    }
                }
            }
        }
    }

    // Randomized above: 1000 cases over N = 5..=8.
    let mut rng = SplitMix64::new(0x6666);
    for _ in 0..1000 {
        let n_bits = rng.below(4) as usize + 5;
        let (i, f, h) = random_triple(&mut rng, n_bits);
        let value = rng.below(1 << n_bits);
        let term = StringTerm::from_number(value, n_bits).unwrap();
        let mut sys = ReferenceSystem::new(n_bits, rng.next_u64()).unwrap();
        if rng.flip() {
            sys.xor_gate(i, f, h, XorVariant::Ones).unwrap();
            assert_eq!(
                decode_term(&term, &sys).unwrap(),
                classical(value, i, f, h, false)
            );
        } else {
            sys.xnor_gate(i, f, h, XnorMode::Direct, XnorVariant::Standard)
                .unwrap();
            assert_eq!(
                decode_term(&term, &sys).unwrap(),
                classical(value, i, f, h, true)
            );
        }
    }
}

/// Classical oracle for disjoint-output schedules: apply h := i op f to the
/// term's current value, gate by gate.
fn classical_apply(value: u64, sched: &GateSchedule) -> u64 {
    let mut v = value;
    for op in sched.ops() {
        match *op {
            GateOp::Not { h } => v ^= 1 << (h - 1),
            GateOp::Clear { h } => v &= !(1 << (h - 1)),
            GateOp::Xor { i, f, h, .. } => {
                let bit = (v >> (i - 1) & 1) ^ (v >> (f - 1) & 1);
                v = (v & !(1 << (h - 1))) | bit << (h - 1);
            }
            GateOp::Xnor { i, f, h, .. } => {
                let bit = 1 ^ (v >> (i - 1) & 1) ^ (v >> (f - 1) & 1);
                v = (v & !(1 << (h - 1))) | bit << (h - 1);
            }
        }
    }
    v
}

#[test]
fn disjoint_output_schedules_match_the_classical_oracle() {
    let mut rng = SplitMix64::new(0x5555);
    for _ in 0..200 {
        let n_bits = rng.below(4) as usize + 5; // 5..=8
                                                // Outputs are drawn from bits never used in any role, so no output
                                                // is ever read as a later input.
        let mut untouched: Vec<usize> = (1..=n_bits).collect();
        let mut input_only: Vec<usize> = Vec::new();
        let mut ops = Vec::new();
        while !untouched.is_empty() && untouched.len() + input_only.len() >= 3 && ops.len() < 2 {
            let h = untouched.remove(rng.below(untouched.len() as u64) as usize);
            let pool: Vec<usize> = untouched.iter().chain(input_only.iter()).copied().collect();
            if pool.len() < 2 {
                break;
            }
            let i = pool[rng.below(pool.len() as u64) as usize];
            let f = loop {
                let c = pool[rng.below(pool.len() as u64) as usize];
                if c != i {
                    break c;
                }
            };
            for used in [i, f] {
                untouched.retain(|&b| b != used);
                if !input_only.contains(&used) {
                    input_only.push(used);
                }
            }
            ops.push(if rng.flip() {
                GateOp::Xor {
                    i,
                    f,
                    h,
                    variant: XorVariant::Ones,
                }
            } else {
                GateOp::Xnor {
                    i,
                    f,
                    h,
                    mode: XnorMode::Direct,
                    variant: XnorVariant::Standard,
                }
            });
        }
        let sched = GateSchedule::new(ops);
        let sup = random_superposition(&mut rng, n_bits, 16);
        let mut sys = ReferenceSystem::new(n_bits, rng.next_u64()).unwrap();
        sched.apply(&mut sys).unwrap();

        let mut expected = std::collections::BTreeMap::new();
        for term in sup.terms() {
            *expected
                .entry(classical_apply(term.value(), &sched))
                .or_insert(0) += term.multiplicity();
        }
        assert_eq!(decode_superposition(&sup, &sys).unwrap(), expected);
    }
}
