//! ASFWGSC: away-step Frank-Wolfe with analytic GSC steps.

use std::collections::BTreeMap;

use super::{check_start, should_stop, Method, Recorder, RunTrace, SolverConfig, StepKind};
use crate::error::{Error, Result};
use crate::gsc::{LocalGeometry, Objective};
use crate::linalg::{along, axpy, dist2, dot, norm2, sub};
use crate::oracles::{FeasibleSet, Vertex, VertexId};
use crate::stepsize::analytic_step;

/// Weights below this are dropped from the active set.
pub const PURGE_BELOW: f64 = 1e-12;

/// Iterate represented as a convex combination of polytope vertices, keyed
/// by vertex id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ActiveSet {
    vertices: BTreeMap<VertexId, (Vec<f64>, f64)>,
}

impl ActiveSet {
    pub fn from_parts(parts: Vec<(Vertex, f64)>) -> Result<Self> {
        let mut vertices = BTreeMap::new();
        for (v, w) in parts {
            let id = v.id.ok_or_else(|| Error::Unsupported("vertex without an id".into()))?;
            vertices
                .entry(id)
                .and_modify(|e: &mut (Vec<f64>, f64)| e.1 += w)
                .or_insert((v.point, w));
        }
        let mut set = Self { vertices };
        set.purge();
        if set.vertices.is_empty() {
            return Err(Error::Empty("active set"));
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn weight(&self, id: VertexId) -> Option<f64> {
        self.vertices.get(&id).map(|e| e.1)
    }

    pub fn total_weight(&self) -> f64 {
        self.vertices.values().map(|e| e.1).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &[f64], f64)> {
        self.vertices.iter().map(|(&id, (p, w))| (id, p.as_slice(), *w))
    }

    /// `Σ μ_u u`.
    pub fn reconstruct(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (p, w) in self.vertices.values() {
            axpy(*w, p, &mut x);
        }
        x
    }

    /// Weights after `x ← x + α (s − x)`.
    pub fn forward(&mut self, s: &Vertex, alpha: f64) -> Result<()> {
        let id = s.id.ok_or_else(|| Error::Unsupported("oracle returned a vertex without an id".into()))?;
        if alpha >= 1.0 {
            self.vertices.clear();
            self.vertices.insert(id, (s.point.clone(), 1.0));
            return Ok(());
        }
        for e in self.vertices.values_mut() {
            e.1 *= 1.0 - alpha;
        }
        self.vertices
            .entry(id)
            .and_modify(|e| e.1 += alpha)
            .or_insert_with(|| (s.point.clone(), alpha));
        self.purge();
        Ok(())
    }

    /// Weights after `x ← x + α (x − u)`; `drop` removes `u` outright.
    pub fn away(&mut self, id: VertexId, alpha: f64, drop: bool) {
        for e in self.vertices.values_mut() {
            e.1 *= 1.0 + alpha;
        }
        if drop {
            self.vertices.remove(&id);
        } else if let Some(e) = self.vertices.get_mut(&id) {
            e.1 -= alpha;
        }
        self.purge();
    }

    fn purge(&mut self) {
        self.vertices.retain(|_, e| e.1 >= PURGE_BELOW);
        let total = self.total_weight();
        if total > 0.0 {
            for e in self.vertices.values_mut() {
                e.1 /= total;
            }
        }
    }
}

/// Active vertex maximizing `⟨grad, u⟩`, lowest id on ties.
pub fn away_vertex<'a>(grad: &[f64], active: &'a ActiveSet) -> Result<(VertexId, &'a [f64], f64)> {
    let mut best: Option<(VertexId, &[f64], f64, f64)> = None;
    for (id, p, w) in active.iter() {
        let val = dot(grad, p);
        if best.is_none_or(|b| val > b.3) {
            best = Some((id, p, w, val));
        }
    }
    best.map(|(id, p, w, _)| (id, p, w))
        .ok_or(Error::Empty("active set"))
}

/// ASFWGSC. The start is decomposed into vertices by the set; a vertex
/// start gives a single-element active set.
pub fn asfwgsc<F: Objective + ?Sized, S: FeasibleSet + ?Sized>(
    obj: &F,
    set: &S,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<RunTrace> {
    check_start(obj, set, x0, config)?;
    if !set.is_polytope() {
        return Err(Error::Unsupported("away steps need a polytope with vertex ids".into()));
    }
    let parts = set
        .vertex_decomposition(x0)
        .ok_or_else(|| Error::Unsupported("set cannot decompose the start into vertices".into()))?;
    let mut active = ActiveSet::from_parts(parts)?;
    let spec = obj.spec();
    let n = obj.dim();
    let mut rec = Recorder::new(Method::Asfwgsc, config);
    let mut x = x0.to_vec();
    for k in 0.. {
        let grad = obj.gradient(&x);
        let s = set.lmo(&grad);
        if s.id.is_none() {
            return Err(Error::Unsupported("oracle returned a vertex without an id".into()));
        }
        let fw_gap = crate::oracles::gap(&grad, &x, &s.point)?;
        let (u_id, u_point, mu_u) = away_vertex(&grad, &active)?;
        let away_gap = (dot(&grad, u_point) - dot(&grad, &x)).max(0.0);
        let u_point = u_point.to_vec();
        let f = obj.value(&x);
        let r = rec.open(k, f, fw_gap, &x);
        r.recon_err = Some(dist2(&active.reconstruct(n), &x) / (1.0 + norm2(&x)));
        r.active_size = Some(active.len());
        if let Some(status) = should_stop(k, fw_gap, config) {
            return Ok(rec.finish(status, x));
        }
        let mut forward = fw_gap >= away_gap;
        if !forward && active.len() == 1 {
            forward = true;
            r.forced_forward = true;
        }
        let (dir, g, cap) = if forward {
            (sub(&s.point, &x), fw_gap, 1.0)
        } else {
            (sub(&x, &u_point), away_gap, mu_u / (1.0 - mu_u))
        };
        r.g_as = Some(fw_gap.max(away_gap));
        let geom = LocalGeometry::along(obj, &x, &dir, g);
        let dec = analytic_step(&spec, &geom, cap)?.expect("positive gap past the stopping test");
        let alpha = dec.alpha;
        let y = along(&x, alpha, &dir);
        if !obj.in_domain(&y) {
            return Err(Error::NotInDomain);
        }
        r.alpha = alpha;
        r.predicted = Some(dec.predicted_decrease);
        r.dikin = Some(alpha * spec.m_f() * geom.delta);
        if forward {
            r.step_kind = Some(StepKind::Forward);
            active.forward(&s, alpha)?;
        } else {
            let drop = alpha >= cap;
            r.step_kind = Some(if drop { StepKind::Drop } else { StepKind::Away });
            active.away(u_id, alpha, drop);
        }
        x = y;
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::UnitSimplex;
    use crate::solvers::testing::{monotone, LogBarrier, Quadratic};
    use crate::solvers::{fwgsc, Status};

    fn simplex_vertex(n: usize, i: usize) -> Vertex {
        Vertex {
            id: Some(i as u64),
            point: crate::linalg::unit(n, i, 1.0),
        }
    }

    #[test]
    fn away_cap_for_quarter_weight() {
        let mu: f64 = 0.25;
        assert!((mu / (1.0 - mu) - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn away_vertex_examples() {
        let single = ActiveSet::from_parts(vec![(simplex_vertex(3, 2), 1.0)]).unwrap();
        assert_eq!(away_vertex(&[1.0, 2.0, 3.0], &single).unwrap().0, 2);
        let two = ActiveSet::from_parts(vec![(simplex_vertex(3, 0), 0.5), (simplex_vertex(3, 1), 0.5)]).unwrap();
        assert_eq!(away_vertex(&[1.0, 5.0, 0.0], &two).unwrap().0, 1);
        // shifting the gradient by a constant leaves the choice unchanged
        assert_eq!(away_vertex(&[8.0, 12.0, 7.0], &two).unwrap().0, 1);
        // ties go to the lowest id
        assert_eq!(away_vertex(&[2.0, 2.0, 0.0], &two).unwrap().0, 0);
        assert!(away_vertex(&[1.0], &ActiveSet::default()).is_err());
    }

    #[test]
    fn vru_updates_keep_the_representation() {
        let n = 3;
        let mut a = ActiveSet::from_parts(vec![(simplex_vertex(n, 0), 1.0)]).unwrap();
        let mut x = vec![1.0, 0.0, 0.0];
        let s = simplex_vertex(n, 2);
        a.forward(&s, 0.3).unwrap();
        x = along(&x, 0.3, &sub(&s.point, &x));
        assert!(dist2(&a.reconstruct(n), &x) < 1e-15);
        // away from e_1 with the drop cap removes it
        let mu = a.weight(0).unwrap();
        let cap = mu / (1.0 - mu);
        let u = crate::linalg::unit(n, 0, 1.0);
        x = along(&x, cap, &sub(&x, &u));
        a.away(0, cap, true);
        assert_eq!(a.len(), 1);
        assert!(dist2(&a.reconstruct(n), &x) < 1e-15);
        assert!((a.total_weight() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn asfw_on_barrier_keeps_bookkeeping() {
        let obj = LogBarrier(5);
        let set = UnitSimplex::new(5);
        let cfg = SolverConfig {
            epsilon: 1e-10,
            max_iter: 2000,
            ..Default::default()
        };
        let x0 = [0.6, 0.1, 0.1, 0.1, 0.1];
        let tr = asfwgsc(&obj, &set, &x0, &cfg).unwrap();
        assert_eq!(tr.status, Status::GapConverged);
        let values: Vec<f64> = tr.values().collect();
        assert!(monotone(&values).unwrap());
        let mut drops = 0;
        for r in &tr.records {
            assert!(r.recon_err.unwrap() < 1e-9);
            if r.step_kind == Some(StepKind::Drop) {
                drops += 1;
            }
            assert!(drops <= r.k.div_ceil(2) + 1);
        }
    }

    #[test]
    fn asfw_beats_plain_fwgsc_on_a_face_optimum() {
        // minimizer in the relative interior of a 3-vertex face, where plain FW zig-zags
        let obj = Quadratic {
            curv: vec![1.0, 2.0, 1.5, 1.0, 3.0, 2.0],
            center: vec![0.5, 0.4, 0.3, -0.2, -0.3, -0.1],
        };
        let set = UnitSimplex::new(6);
        let cfg = SolverConfig {
            epsilon: 1e-8,
            max_iter: 20000,
            ..Default::default()
        };
        let x0 = crate::linalg::unit(6, 5, 1.0);
        let a = asfwgsc(&obj, &set, &x0, &cfg).unwrap();
        let f = fwgsc(&obj, &set, &x0, &cfg).unwrap();
        assert_eq!(a.status, Status::GapConverged);
        assert!(a.iterations() * 5 < f.iterations());
    }

    #[test]
    fn non_polytopes_are_rejected() {
        let obj = Quadratic {
            curv: vec![1.0; 2],
            center: vec![0.0; 2],
        };
        let set = crate::oracles::ProductSet::new(vec![crate::oracles::Block::EuclidBall { dim: 2, radius: 1.0 }]);
        assert!(matches!(
            asfwgsc(&obj, &set, &[0.5, 0.0], &SolverConfig::default()),
            Err(Error::Unsupported(_))
        ));
    }
}
