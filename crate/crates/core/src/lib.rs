//! Exact algebra over truncated p-adic group rings: canonical linear algebra
//! over Z/p^k, finite p-groups and their extensions, finitely presented
//! Z_p[G]-modules, second group cohomology and its Ext^1 realization through
//! the extension translation functor, and a verified pipeline that proves
//! prescribed-lattice statements by explicit Schanuel isomorphisms and free
//! cancellation.

pub mod error;
pub mod ring;
pub mod matrix;
pub mod howell;
pub mod smith;
pub mod group;
pub mod amodule;
pub mod cocycle;
pub mod extension;
pub mod gmodule;
pub mod exact;
pub mod cohomology;
pub mod translate;
pub mod json;
pub mod pipeline;

pub use amodule::FiniteAModule;
pub use cocycle::Cocycle2;
pub use error::{Error, Result};
pub use exact::{ExactSeq, ExactnessCert, FourTermSeq};
pub use extension::GroupExtension;
pub use gmodule::{GHom, GModule};
pub use group::Group;
pub use matrix::PMatrix;
pub use ring::RingContext;
