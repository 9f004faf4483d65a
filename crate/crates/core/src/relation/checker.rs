//! Direct satisfiability check of a laid-out circuit.
//!
//! Evaluates every enabled gate, copy constraint, constant cell, lookup and
//! instance cell of a keygen-mode builder. Equivalent to running the mock
//! prover on the virtual layout, without materializing the physical columns.

use std::collections::HashMap;

use halo2_base::gates::circuit::{builder::BaseCircuitBuilder, CircuitBuilderStage};
use halo2_base::halo2_proofs::halo2curves::ff::PrimeField;
use halo2_base::ContextCell;

use super::circuit::synthesize;
use super::{RelationDescription, Witness};
use crate::field::{FieldElement, Fr};

/// Size of a laid-out circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircuitStats {
    /// Enabled instances of the arithmetic gate.
    pub gates: usize,
    /// Cells range-checked through the lookup table.
    pub lookups: usize,
    pub advice_cells: usize,
    pub copies: usize,
}

impl CircuitStats {
    /// The constraint count: one per enabled gate plus one per lookup.
    pub fn constraints(&self) -> usize {
        self.gates + self.lookups
    }
}

/// Builds the circuit in keygen mode so that selectors and copy constraints
/// are recorded.
pub fn layout(desc: &RelationDescription, public: &[FieldElement], w: &Witness, lookup_bits: usize) -> BaseCircuitBuilder<Fr> {
    let mut b = BaseCircuitBuilder::from_stage(CircuitBuilderStage::Keygen)
        .use_k(lookup_bits + 1)
        .use_lookup_bits(lookup_bits)
        .use_instance_columns(1);
    synthesize(&mut b, desc, public, w);
    b
}

pub fn stats(b: &mut BaseCircuitBuilder<Fr>) -> CircuitStats {
    let threads = &b.pool(0).threads;
    let gates = threads.iter().map(|c| c.selector.iter().filter(|s| **s).count()).sum();
    let advice_cells = threads.iter().map(|c| c.advice.len()).sum();
    let copies = {
        let m = b.pool(0).copy_manager.lock().unwrap();
        m.advice_equalities.len() + m.constant_equalities.len()
    };
    let lookups = b.lookup_manager()[0].cells_to_lookup.lock().unwrap().values().map(Vec::len).sum();
    CircuitStats { gates, lookups, advice_cells, copies }
}

fn below_pow2(x: &Fr, bits: usize) -> bool {
    let repr = x.to_repr();
    (0..256).all(|i| i < bits || (repr[i / 8] >> (i % 8)) & 1 == 0)
}

/// Returns the first violated constraint, if any.
pub fn check(b: &mut BaseCircuitBuilder<Fr>, lookup_bits: usize) -> Result<(), String> {
    let pool = b.pool(0);
    let mut values: HashMap<(&'static str, usize), Vec<Fr>> = HashMap::new();
    for ctx in &pool.threads {
        let vals: Vec<Fr> = ctx.advice.iter().map(|a| a.evaluate()).collect();
        for (i, sel) in ctx.selector.iter().enumerate() {
            if *sel {
                let [a, bb, c, d] = [vals[i], vals[i + 1], vals[i + 2], vals[i + 3]];
                if a + bb * c != d {
                    return Err(format!("gate at {}:{} offset {i}", ctx.type_id(), ctx.id()));
                }
            }
        }
        values.insert(ctx.tag(), vals);
    }
    let get = |c: &ContextCell| values.get(&(c.type_id, c.context_id)).and_then(|v| v.get(c.offset)).copied();
    {
        let m = pool.copy_manager.lock().unwrap();
        for (x, y) in &m.advice_equalities {
            if get(x).is_none() || get(x) != get(y) {
                return Err(format!("copy constraint {x:?} = {y:?}"));
            }
        }
        for (k, cell) in &m.constant_equalities {
            if get(cell) != Some(*k) {
                return Err(format!("constant cell {cell:?}"));
            }
        }
    }
    for cells in b.lookup_manager()[0].cells_to_lookup.lock().unwrap().values() {
        for [cell] in cells {
            if !below_pow2(&cell.value.evaluate(), lookup_bits) {
                return Err(format!("lookup {:?}", cell.cell));
            }
        }
    }
    Ok(())
}

/// Whether the circuit laid out from `(public, w)` is satisfied and exposes
/// exactly `public` as instances.
pub fn circuit_accepts(desc: &RelationDescription, public: &[FieldElement], w: &Witness, lookup_bits: usize) -> bool {
    let mut b = layout(desc, public, w, lookup_bits);
    let exposed: Vec<Fr> = b.assigned_instances.iter().flatten().map(|v| v.value.evaluate()).collect();
    let expected: Vec<Fr> = public.iter().map(|x| x.inner()).collect();
    exposed == expected && check(&mut b, lookup_bits).is_ok()
}
