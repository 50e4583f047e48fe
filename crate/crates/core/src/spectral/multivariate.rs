use ndarray::Array2;

use super::{
    check_same_size, entropy, gram_entropy, joint_gram, normalized_hadamard, spectrum,
    EntropyOrder, InfoKind, InfoQuantity,
};
use crate::error::{invalid_input, Result};
use crate::kernel::NormalizedGram;
use crate::scalar::Scalar;

/// Largest variable count accepted by the subset-sum measures (2^k joints).
pub const MAX_SUBSET_VARIABLES: usize = 19;

/// `I_α(B; {A_1..A_k}) = S_α(B) + S_α(A_1∘..∘A_k) − S_α(A_1∘..∘A_k∘B)`.
pub fn multivariate_mi<T: Scalar>(
    target: &NormalizedGram<T>,
    features: &[&NormalizedGram<T>],
    order: EntropyOrder<T>,
) -> Result<InfoQuantity<T>> {
    if features.is_empty() {
        return Err(invalid_input(
            "multivariate mutual information needs at least one feature",
        ));
    }
    let mut all: Vec<&NormalizedGram<T>> = features.to_vec();
    all.push(target);
    check_same_size(&all)?;
    let features_joint = gram_entropy(&joint_gram(features)?, order)?;
    let full_joint = gram_entropy(&joint_gram(&all)?, order)?;
    let bits = gram_entropy(target, order)? + features_joint - full_joint;
    Ok(InfoQuantity::new(bits, InfoKind::MultivariateMi))
}

/// `Σ_i S_α(A_i) − S_α(A_1∘..∘A_k)`.
pub fn total_correlation<T: Scalar>(
    grams: &[&NormalizedGram<T>],
    order: EntropyOrder<T>,
) -> Result<InfoQuantity<T>> {
    check_same_size(grams)?;
    let marginals = grams
        .iter()
        .map(|g| gram_entropy(g, order))
        .collect::<Result<Vec<T>>>()?
        .into_iter()
        .sum::<T>();
    let bits = marginals - gram_entropy(&joint_gram(grams)?, order)?;
    Ok(InfoQuantity::new(bits, InfoKind::TotalCorrelation))
}

/// Joint entropies of every subset of a family of Gram matrices, indexed by
/// bitmask (bit `i` set means variable `i` participates). The empty set has
/// entropy zero.
///
/// Subsets are visited depth-first, each joint built from its parent's
/// normalized joint with one more Hadamard factor, so every one of the `2^k`
/// joints is eigendecomposed exactly once.
#[derive(Debug, Clone)]
pub struct SubsetEntropies<T> {
    k: usize,
    entropies: Vec<T>,
}

impl<T: Scalar> SubsetEntropies<T> {
    pub fn compute(grams: &[&NormalizedGram<T>], order: EntropyOrder<T>) -> Result<Self> {
        check_same_size(grams)?;
        let k = grams.len();
        if k > MAX_SUBSET_VARIABLES {
            return Err(invalid_input(format!(
                "subset enumeration over {k} variables would need 2^{k} joint entropies; at most {MAX_SUBSET_VARIABLES} variables are supported"
            )));
        }
        let mut entropies = vec![T::zero(); 1 << k];
        visit(grams, order, 0, 0, None, &mut entropies)?;
        Ok(Self { k, entropies })
    }

    pub fn variables(&self) -> usize {
        self.k
    }

    pub fn get(&self, mask: usize) -> T {
        self.entropies[mask]
    }

    /// `−Σ_{s⊆[k]} (−1)^(k−|s|) S_α(s)`.
    pub fn interaction_information(&self) -> T {
        let parity_k = if self.k % 2 == 0 { T::one() } else { -T::one() };
        self.signed_sum(parity_k)
    }

    /// `−Σ_{s⊆[k]} (−1)^|s| S_α(s)`.
    pub fn co_information(&self) -> T {
        self.signed_sum(T::one())
    }

    /// `Σ_s (−sign·(−1)^|s|) S(s)` summed in mask order; both measures share
    /// the same terms so `CI = (−1)^k II` holds exactly.
    fn signed_sum(&self, sign: T) -> T {
        self.entropies
            .iter()
            .enumerate()
            .skip(1)
            .map(|(mask, &h)| {
                let parity = if mask.count_ones() % 2 == 0 {
                    T::one()
                } else {
                    -T::one()
                };
                -(sign * parity) * h
            })
            .fold(T::zero(), |acc, v| acc + v)
    }
}

fn visit<T: Scalar>(
    grams: &[&NormalizedGram<T>],
    order: EntropyOrder<T>,
    mask: usize,
    next: usize,
    joint: Option<&Array2<T>>,
    out: &mut [T],
) -> Result<()> {
    for j in next..grams.len() {
        let child = match joint {
            None => grams[j].matrix().clone(),
            Some(parent) => normalized_hadamard(parent, grams[j].matrix()),
        };
        let child = NormalizedGram::from_parts(child);
        let child_mask = mask | (1 << j);
        out[child_mask] = entropy(&spectrum(&child)?, order).bits;
        visit(grams, order, child_mask, j + 1, Some(child.matrix()), out)?;
    }
    Ok(())
}

fn subset_measure_arity<T: Scalar>(grams: &[&NormalizedGram<T>]) -> Result<()> {
    if grams.len() < 2 {
        return Err(invalid_input(format!(
            "interaction measures need at least 2 variables, got {}",
            grams.len()
        )));
    }
    Ok(())
}

/// Interaction information, the alternating sum over all `2^k` subsets.
pub fn interaction_information<T: Scalar>(
    grams: &[&NormalizedGram<T>],
    order: EntropyOrder<T>,
) -> Result<InfoQuantity<T>> {
    subset_measure_arity(grams)?;
    let subsets = SubsetEntropies::compute(grams, order)?;
    Ok(InfoQuantity::new(
        subsets.interaction_information(),
        InfoKind::InteractionInfo,
    ))
}

/// Co-information; equals `(−1)^k` times the interaction information.
pub fn co_information<T: Scalar>(
    grams: &[&NormalizedGram<T>],
    order: EntropyOrder<T>,
) -> Result<InfoQuantity<T>> {
    subset_measure_arity(grams)?;
    let subsets = SubsetEntropies::compute(grams, order)?;
    Ok(InfoQuantity::new(
        subsets.co_information(),
        InfoKind::CoInfo,
    ))
}
