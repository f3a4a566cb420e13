//! Categories built from a tangent category: the Karoubi envelope, display
//! slices, partial maps over a system of monics, open subobjects, and
//! cartesian lifts of the display codomain fibration.
//!
//! Every construction mints fresh identifiers and keeps a provenance map back
//! to the source cells, then re-runs the relevant checkers on its output.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::fincat::{CategoryBuilder, FinCategory, MorId, NameMinter, ObjId};
use crate::tangent::{AxiomReport, TangentError};

pub mod fibration;
pub mod karoubi;
pub mod open;
pub mod par;
pub mod slice;

pub use fibration::{cartesian_lift, slice_display_transfer, CartesianLift};
pub use karoubi::{karoubi_condition_comparison, karoubi_envelope, KaroubiComparison, SplitOutput};
pub use open::{open_subobjects, OpenElement, OpenPoset};
pub use par::{par_category, ParChecks, ParOutput};
pub use slice::{slice_tangent_category, term_slice_unit_counit, SliceOutput, TermSliceReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("source tangent structure fails its axioms: {0}")]
    SourceFailsAxioms(String),
    #[error("no mediator for the {diagram} diagram at {object}")]
    MissingMediator {
        diagram: &'static str,
        object: String,
    },
    #[error("constructed table is not closed: {0}")]
    NotClosed(String),
    #[error(transparent)]
    Tangent(#[from] TangentError),
    #[error("precondition fails: {0}")]
    Precondition(String),
    #[error("no terminal object")]
    NoTerminal,
    #[error("not a cartesian tangent category: {0}")]
    NotCartesian(String),
}

pub(crate) fn require_axioms(report: &AxiomReport) -> Result<(), ConstructionError> {
    match report.failing().next() {
        None => Ok(()),
        Some(c) => Err(ConstructionError::SourceFailsAxioms(alloc::format!(
            "{} / {}: {}",
            c.group,
            c.name,
            c.failures.first().map(String::as_str).unwrap_or("")
        ))),
    }
}

/// Builds a category from cells given by fresh names and a composition rule.
pub(crate) struct Assembler {
    builder: CategoryBuilder,
    obj_names: NameMinter,
    mor_names: NameMinter,
    mors: Vec<(ObjId, ObjId)>,
}

impl Assembler {
    pub fn new() -> Self {
        Self {
            builder: CategoryBuilder::new(),
            obj_names: NameMinter::new(),
            mor_names: NameMinter::new(),
            mors: Vec::new(),
        }
    }

    pub fn object(&mut self, base: &str) -> ObjId {
        let name = self.obj_names.mint(base);
        self.builder.object(&name).expect("minted names are fresh")
    }

    pub fn morphism(&mut self, base: &str, dom: ObjId, cod: ObjId) -> MorId {
        let name = self.mor_names.mint(base);
        self.mors.push((dom, cod));
        self.builder
            .morphism(&name, dom, cod)
            .expect("minted names are fresh")
    }

    pub fn identity(&mut self, obj: ObjId, mor: MorId) {
        self.builder.identity(obj, mor).expect("one identity per object");
    }

    /// Fill every composable pair from `compose`, failing on a gap.
    pub fn finish(
        mut self,
        compose: impl Fn(MorId, MorId) -> Option<MorId>,
    ) -> Result<FinCategory, ConstructionError> {
        let n = self.mors.len();
        for i in 0..n {
            for j in 0..n {
                if self.mors[i].1 != self.mors[j].0 {
                    continue;
                }
                let (f, g) = (MorId(i as u32), MorId(j as u32));
                let h = compose(f, g).ok_or_else(|| {
                    ConstructionError::NotClosed(alloc::format!(
                        "no composite for cells {i} and {j}"
                    ))
                })?;
                self.builder.then(f, g, h).expect("cells are in range");
            }
        }
        Ok(self.builder.build())
    }
}
