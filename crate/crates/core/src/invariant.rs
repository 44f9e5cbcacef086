//! The smoothing invariant of knot diagrams.
//!
//! Smoothing one crossing of a knot diagram produces a two-component
//! link diagram. Summing, over all crossings, a basis symbol indexed by
//! an invariant of that smoothing (`X` for positive crossings, `Y` for
//! negative ones) yields a diagram invariant whose value changes by an
//! element of `R` under any single Reidemeister move. With the linking
//! number as the smoothing invariant this gives a lower bound on the
//! number of moves between two diagrams of the same knot.

use crate::algebra::{g_hom, FormalSum, GroupElement};
use crate::diagram::{Diagram, DiagramError, LinkComponentMap, Sign};

/// Generic smoothing sum: applies `phi` to every crossing's smoothing
/// and accumulates `X_{phi}` per positive crossing, `Y_{phi}` per
/// negative one.
pub fn i_phi<K, F>(d: &Diagram, mut phi: F) -> Result<FormalSum<K>, DiagramError>
where
    K: Ord + Clone,
    F: FnMut(&Diagram, &LinkComponentMap) -> Result<K, DiagramError>,
{
    let cm = d.trace_components();
    if !cm.is_knot() {
        return Err(DiagramError::NotAKnot {
            components: cm.component_count(),
        });
    }
    let mut sum = FormalSum::zero();
    for c in 0..d.num_crossings() {
        let smoothed = d.smooth(c)?;
        let scm = smoothed.trace_components();
        let label = phi(&smoothed, &scm)?;
        let family = match d.crossing_sign(c)? {
            Sign::Pos => crate::algebra::Family::X,
            Sign::Neg => crate::algebra::Family::Y,
        };
        sum.add_term(family, label, 1);
    }
    Ok(sum)
}

/// The linking-number instance: `i_lk(d) = sum X_{lk(d^c)} over positive
/// crossings plus sum Y_{lk(d^c)} over negative ones.
pub fn i_lk(d: &Diagram) -> Result<GroupElement, DiagramError> {
    i_phi(d, |s, cm| s.linking_number(cm))
}

/// Per-crossing contributions of `i_lk`, in crossing order: the sign and
/// the linking number of that crossing's smoothing.
pub fn i_lk_contributions(d: &Diagram) -> Result<Vec<(Sign, i64)>, DiagramError> {
    let cm = d.trace_components();
    if !cm.is_knot() {
        return Err(DiagramError::NotAKnot {
            components: cm.component_count(),
        });
    }
    (0..d.num_crossings())
        .map(|c| {
            let smoothed = d.smooth(c)?;
            let lk = smoothed.linking_number(&smoothed.trace_components())?;
            Ok((d.crossing_sign(c)?, lk))
        })
        .collect()
}

/// `|g(i_lk(a) - i_lk(b))|`: a lower bound for the number of
/// Reidemeister moves between two diagrams of the same knot.
pub fn lower_bound(a: &Diagram, b: &Diagram) -> Result<i64, DiagramError> {
    Ok(g_hom(&(i_lk(a)? - i_lk(b)?)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Family;

    fn pd(text: &str) -> Diagram {
        Diagram::from_pd_text(text).unwrap()
    }

    #[test]
    fn unknot_vanishes() {
        assert!(i_lk(&Diagram::unknot()).unwrap().is_zero());
    }

    #[test]
    fn kinks() {
        assert_eq!(i_lk(&pd("X 0 0 1 1")).unwrap(), GroupElement::x(0));
        assert_eq!(i_lk(&pd("X 0 1 1 0")).unwrap(), GroupElement::y(0));
    }

    #[test]
    fn right_trefoil() {
        let d = pd("X 1 4 2 5\nX 3 6 4 1\nX 5 2 6 3").mirror();
        assert_eq!(i_lk(&d).unwrap(), GroupElement::x(1).scaled(3));
        assert_eq!(lower_bound(&d, &Diagram::unknot()).unwrap(), 6);
    }

    #[test]
    fn mirror_swaps_families_and_negates_indices() {
        let diagrams = [
            pd("X 0 0 1 1"),
            pd("X 1 4 2 5\nX 3 6 4 1\nX 5 2 6 3"),
        ];
        for d in diagrams {
            let v = i_lk(&d).unwrap();
            let m = i_lk(&d.mirror()).unwrap();
            let mut swapped = GroupElement::zero();
            for (f, k, c) in v.terms() {
                let nf = match f {
                    Family::X => Family::Y,
                    Family::Y => Family::X,
                };
                swapped.add_term(nf, -k, c);
            }
            assert_eq!(m, swapped);
        }
    }

    #[test]
    fn i_phi_constant_counts_signs() {
        let d = pd("X 0 0 1 1");
        let v = i_phi(&d, |_, _| Ok(0i64)).unwrap();
        assert_eq!(v, GroupElement::x(0));
        // component count minus two is identically zero on smoothings
        let w = i_phi(&d, |_, cm| Ok(cm.component_count() as i64 - 2)).unwrap();
        assert_eq!(w, v);
    }

    #[test]
    fn multi_component_input_rejected() {
        let hopf = pd("X 0 2 1 3\nX 2 0 3 1");
        assert!(matches!(
            i_lk(&hopf),
            Err(DiagramError::NotAKnot { components: 2 })
        ));
    }

    #[test]
    fn lower_bound_self_is_zero() {
        let d = pd("X 1 4 2 5\nX 3 6 4 1\nX 5 2 6 3");
        assert_eq!(lower_bound(&d, &d).unwrap(), 0);
    }
}
