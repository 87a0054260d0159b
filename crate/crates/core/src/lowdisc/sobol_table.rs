//! Primitive polynomials and initial direction numbers for the Sobol
//! sequence, dimensions 2 through 32.
//!
//! Source: S. Joe and F. Y. Kuo, "Constructing Sobol sequences with better
//! two-dimensional projections", SIAM J. Sci. Comput. 30 (2008), data file
//! `new-joe-kuo-6.21201` (rows d = 2..32). Dimension 1 is the van der Corput
//! sequence and has no entry. `coeffs` packs the interior polynomial
//! coefficients a_1..a_{s-1} with a_1 as the most significant bit.

pub(crate) struct SobolDirection {
    pub degree: u32,
    pub coeffs: u32,
    pub initial: &'static [u32],
}

pub(crate) const TABLE: &[SobolDirection] = &[
    SobolDirection { degree: 1, coeffs: 0, initial: &[1] },
    SobolDirection { degree: 2, coeffs: 1, initial: &[1, 3] },
    SobolDirection { degree: 3, coeffs: 1, initial: &[1, 3, 1] },
    SobolDirection { degree: 3, coeffs: 2, initial: &[1, 1, 1] },
    SobolDirection { degree: 4, coeffs: 1, initial: &[1, 1, 3, 3] },
    SobolDirection { degree: 4, coeffs: 4, initial: &[1, 3, 5, 13] },
    SobolDirection { degree: 5, coeffs: 2, initial: &[1, 1, 5, 5, 17] },
    SobolDirection { degree: 5, coeffs: 4, initial: &[1, 1, 5, 5, 5] },
    SobolDirection { degree: 5, coeffs: 7, initial: &[1, 1, 7, 11, 19] },
    SobolDirection { degree: 5, coeffs: 11, initial: &[1, 1, 5, 1, 1] },
    SobolDirection { degree: 5, coeffs: 13, initial: &[1, 1, 1, 3, 11] },
    SobolDirection { degree: 5, coeffs: 14, initial: &[1, 3, 5, 5, 31] },
    SobolDirection { degree: 6, coeffs: 1, initial: &[1, 3, 3, 9, 7, 49] },
    SobolDirection { degree: 6, coeffs: 13, initial: &[1, 1, 1, 15, 21, 21] },
    SobolDirection { degree: 6, coeffs: 16, initial: &[1, 3, 1, 13, 27, 49] },
    SobolDirection { degree: 6, coeffs: 19, initial: &[1, 1, 1, 15, 7, 5] },
    SobolDirection { degree: 6, coeffs: 22, initial: &[1, 3, 1, 15, 13, 25] },
    SobolDirection { degree: 6, coeffs: 25, initial: &[1, 1, 5, 5, 19, 61] },
    SobolDirection { degree: 7, coeffs: 1, initial: &[1, 3, 7, 11, 23, 15, 103] },
    SobolDirection { degree: 7, coeffs: 4, initial: &[1, 3, 7, 13, 13, 15, 69] },
    SobolDirection { degree: 7, coeffs: 7, initial: &[1, 1, 3, 13, 7, 35, 63] },
    SobolDirection { degree: 7, coeffs: 8, initial: &[1, 3, 5, 9, 1, 25, 53] },
    SobolDirection { degree: 7, coeffs: 14, initial: &[1, 3, 1, 13, 9, 35, 107] },
    SobolDirection { degree: 7, coeffs: 19, initial: &[1, 3, 1, 5, 27, 61, 31] },
    SobolDirection { degree: 7, coeffs: 21, initial: &[1, 1, 5, 11, 19, 41, 61] },
    SobolDirection { degree: 7, coeffs: 28, initial: &[1, 3, 5, 3, 3, 13, 69] },
    SobolDirection { degree: 7, coeffs: 31, initial: &[1, 1, 7, 13, 1, 19, 1] },
    SobolDirection { degree: 7, coeffs: 32, initial: &[1, 3, 7, 5, 13, 19, 59] },
    SobolDirection { degree: 7, coeffs: 37, initial: &[1, 1, 3, 9, 25, 29, 41] },
    SobolDirection { degree: 7, coeffs: 41, initial: &[1, 3, 5, 13, 23, 1, 55] },
    SobolDirection { degree: 7, coeffs: 42, initial: &[1, 3, 7, 3, 13, 59, 17] },
];
