//! Graph types and algorithms: DAGs, CPDAGs, random graph models, Markov
//! equivalence classes and d-separation.

mod cpdag;
mod dag;
mod dsep;
pub mod edgelist;
mod sample;

pub use cpdag::{dag_to_cpdag, enumerate_mec, Cpdag, DEFAULT_MEC_CAP};
pub use dag::{enumerate_all_dags, is_acyclic, BoolMatrix, Dag};
pub use dsep::d_separated;
pub use sample::{sample_dag, sample_er_dag, sample_sf_dag, GraphModel, GraphSpec, SampledDag};
