//! Corpus management: PGM I/O, synthetic faces and dataset manifests.

mod corpus;
pub mod faces;
mod pgm;

pub use corpus::{generate_corpus, Corpus, DatasetManifest, ManifestEntry, Split, MANIFEST_HEADER};
pub use faces::{render_face, FaceParams, IdentityParams, NuisanceParams};
pub use pgm::{decode_pgm, encode_pgm, read_pgm, write_pgm};
