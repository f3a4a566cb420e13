//! Cartesian lifts of the display codomain fibration, and transfer of
//! tangent display maps into display slices.

use alloc::format;
use alloc::vec::Vec;

use super::slice::{slice_tangent_category, SliceOutput};
use super::ConstructionError;
use crate::display::{Classifier, SystemVerdict};
use crate::fincat::{is_iso, FinCategory, MorId, ObjId};
use crate::limits::{compute_pullback, is_pullback_square, Cospan, PullbackCertificate};
use crate::tangent::TangentStructure;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartesianLift {
    /// The canonical pullback of `q` along `f`; its top leg is the lift.
    pub certificate: PullbackCertificate,
    /// Comparison from the apex of the T-image into the canonical lift of
    /// `Tf` over `Tq`.
    pub t_comparison: Option<MorId>,
    /// The T-image is a pullback and the comparison is invertible.
    pub preserved: bool,
}

pub fn cartesian_lift(
    cat: &FinCategory,
    ts: &TangentStructure,
    system: &SystemVerdict,
    f: MorId,
    q: MorId,
) -> Result<CartesianLift, ConstructionError> {
    if !system.members.contains(&q) {
        return Err(ConstructionError::Precondition(format!(
            "{} is not in the system",
            cat.mor_name(q)
        )));
    }
    if cat.cod(f) != cat.cod(q) {
        return Err(ConstructionError::Precondition(format!(
            "{} and {} do not share a codomain",
            cat.mor_name(f),
            cat.mor_name(q)
        )));
    }
    let certificate = compute_pullback(cat, Cospan { left: f, right: q }).ok_or(
        ConstructionError::MissingMediator {
            diagram: "cartesian lift",
            object: cat.mor_name(q).into(),
        },
    )?;
    let image = certificate.square.map(ts.functor());
    let image_is_pullback = matches!(is_pullback_square(cat, &image), Ok(v) if v.holds());
    let t_comparison = compute_pullback(
        cat,
        Cospan {
            left: ts.tm(f),
            right: ts.tm(q),
        },
    )
    .and_then(|c| c.mediator(image.leftv, image.top));
    let preserved = image_is_pullback && t_comparison.is_some_and(|x| is_iso(cat, x));
    Ok(CartesianLift {
        certificate,
        t_comparison,
        preserved,
    })
}

/// Classify the slice morphism `h: [h;g] -> [g]` inside the display slice
/// over the codomain of `g`.
pub fn slice_display_transfer(
    cat: &FinCategory,
    ts: &TangentStructure,
    base: ObjId,
    h: MorId,
    g: MorId,
) -> Result<bool, ConstructionError> {
    let sl = slice_tangent_category(cat, ts, base)?;
    transfer_in(cat, ts, &sl, h, g)
}

pub fn transfer_in(
    cat: &FinCategory,
    ts: &TangentStructure,
    sl: &SliceOutput,
    h: MorId,
    g: MorId,
) -> Result<bool, ConstructionError> {
    let pre = |why: &str| Err(ConstructionError::Precondition(why.into()));
    let Some(f) = cat.then(h, g) else {
        return pre("h and g are not composable");
    };
    let (Some(a), Some(b)) = (sl.object_of(f), sl.object_of(g)) else {
        return pre("h;g and g must be objects of the slice");
    };
    if !Classifier::new(cat, ts).is_t_display(h) {
        return pre("h is not a tangent display map");
    }
    let cell = sl.cell(h, a, b).expect("h is a slice morphism");
    Ok(Classifier::new(&sl.slice_cat, &sl.slice_ts).is_t_display(cell))
}

/// Slice morphisms that are tangent display in the source but not in the
/// slice.
pub fn transfer_counterexamples(
    cat: &FinCategory,
    ts: &TangentStructure,
    sl: &SliceOutput,
) -> Vec<MorId> {
    let src = Classifier::new(cat, ts);
    let tgt = Classifier::new(&sl.slice_cat, &sl.slice_ts);
    sl.slice_cat
        .morphisms()
        .filter(|&c| src.is_t_display(sl.morphism_source[c.index()]) && !tgt.is_t_display(c))
        .collect()
}
