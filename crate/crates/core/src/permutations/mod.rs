//! Permutation predictions for non-clairvoyant scheduling with weighted jobs.
//!
//! The error of a predicted order `X` on a batch `(w, p)` is
//! `Tr((U ⊙ X)ᵀ X w pᵀ)` with `U` the upper-triangular 0/1 mask. Learning
//! runs exponentiated weights over all `n!` orders, which only scales to
//! `n ≤ 8`.

mod batch;
mod learner;

pub use batch::{parse_batches, perm_error, perm_error_with, read_batches, JobBatch, PermutationMatrix, Triangle};
pub use learner::{all_permutations, brute_force_best_perm, perm_eg_learner, MAX_JOBS};
