//! Randomized property checks over exact rationals.

use alloc::vec::Vec;

use rand::Rng;

use super::{is_siegel_parabolic, is_symplectic_matrix, random, GroupKind, SymplecticError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    /// Completion keeps the frame as ω-block and yields a symplectic basis.
    Completion,
    /// Dual basis lies in the given Lagrangian, pairs to δ, and recovers a
    /// completed frame exactly.
    DualBasis,
    /// Greedy Lagrangian search on scrambled forms.
    FindLagrangian,
    /// `b · p ≠ b` for parabolic `p ≠ 1`.
    Freeness,
    /// `transition(b, b·p) = p` and transitions between independently
    /// built bases with equal ω-span roundtrip.
    Transitivity,
    /// `(b·p)·p' = b·(pp')`.
    Associativity,
    /// Closure and inverses in `Sp_2g` and `P_g`.
    GroupClosure,
    /// Rank of `m_g`, dimension of `S_g` and of its image.
    RankCount,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::Completion,
        Property::DualBasis,
        Property::FindLagrangian,
        Property::Freeness,
        Property::Transitivity,
        Property::Associativity,
        Property::GroupClosure,
        Property::RankCount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Completion => "completion",
            Property::DualBasis => "dual_basis",
            Property::FindLagrangian => "find_lagrangian",
            Property::Freeness => "freeness",
            Property::Transitivity => "transitivity",
            Property::Associativity => "associativity",
            Property::GroupClosure => "group_closure",
            Property::RankCount => "rank_count",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PropertyOutcome {
    pub property: Property,
    pub g: usize,
    pub passed: usize,
    pub failed: usize,
}

impl PropertyOutcome {
    pub fn ok(&self) -> bool {
        self.failed == 0 && self.passed > 0
    }
}

fn trial<R: Rng + ?Sized>(p: Property, g: usize, rng: &mut R) -> Result<bool, SymplecticError> {
    let s = random::scrambled_space(rng, g);
    let space = &s.space;
    Ok(match p {
        Property::Completion => {
            let b = random::basis(rng, &s);
            let frame = random::lagrangian_frame(rng, &b);
            let c = space.complete_to_symplectic(&frame)?;
            c.omega_block() == frame
        }
        Property::DualBasis => {
            let b = random::basis(rng, &s);
            let l = random::lagrangian_frame(rng, &b);
            let f = random::complementary_frame(rng, &b);
            let d = space.dual_lagrangian_basis(&l, &f)?;
            let in_span = d.omega_span() == b.omega_span() && d.eta_block() == f;
            let c = space.complete_to_symplectic(&l)?;
            let back = space.dual_lagrangian_basis(&l, &c.eta_block())?;
            in_span && back == c
        }
        Property::FindLagrangian => space.is_lagrangian(&space.find_lagrangian()),
        Property::Freeness => {
            let b = random::basis(rng, &s);
            let p = random::nontrivial_parabolic(rng, g);
            b.act_parabolic(&p)? != b
        }
        Property::Transitivity => {
            let b1 = random::basis(rng, &s);
            let p = random::parabolic(rng, g);
            let roundtrip = b1.transition_parabolic(&b1.act_parabolic(&p)?)? == p;
            let b2 = space.complete_to_symplectic(&random::lagrangian_frame(rng, &b1))?;
            let q = b1.transition_parabolic(&b2)?;
            roundtrip && b1.act_parabolic(&q)? == b2
        }
        Property::Associativity => {
            let b = random::basis(rng, &s);
            let p = random::parabolic(rng, g);
            let q = random::parabolic(rng, g);
            b.act_parabolic(&p)?.act_parabolic(&q)? == b.act_parabolic(&p.compose(&q))?
        }
        Property::GroupClosure => {
            let m1 = random::symplectic(rng, g);
            let m2 = random::symplectic(rng, g);
            let p1 = random::parabolic(rng, g);
            let p2 = random::parabolic(rng, g);
            let prod = m1.compose(&m2);
            let inv = m1.inverse();
            is_symplectic_matrix(prod.matrix())?
                && is_symplectic_matrix(inv.matrix())?
                && inv.compose(&m1).is_identity()
                && is_siegel_parabolic(p1.compose(&p2).matrix())?
                && is_siegel_parabolic(p1.inverse().matrix())?
                && p1.compose(&p2).kind() == GroupKind::Parabolic
        }
        Property::RankCount => {
            let c = space.sg_rank_count(&random::basis(rng, &s));
            c.map_rank == g * g && c.sg_dim == g * (3 * g + 1) / 2 && c.symmetric_image_dim == g * (g + 1) / 2
        }
    })
}

/// Runs `trials` random instances of `property` in genus `g`. A trial that
/// returns an error counts as a failure.
pub fn run_property<R: Rng + ?Sized>(property: Property, g: usize, trials: usize, rng: &mut R) -> PropertyOutcome {
    let mut out = PropertyOutcome { property, g, passed: 0, failed: 0 };
    for _ in 0..trials {
        match trial(property, g, rng) {
            Ok(true) => out.passed += 1,
            _ => out.failed += 1,
        }
    }
    out
}

pub fn selftest<R: Rng + ?Sized>(g: usize, trials: usize, rng: &mut R) -> Vec<PropertyOutcome> {
    Property::ALL.iter().map(|&p| run_property(p, g, trials, rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn small_selftest_passes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for g in 1..=3 {
            for o in selftest(g, 5, &mut rng) {
                assert!(o.ok(), "{:?}", o);
            }
        }
    }
}
