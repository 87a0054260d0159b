//! Unscrambled Sobol integers against values produced by scipy's
//! `qmc.Sobol(d=32, scramble=False, bits=32)`, which uses the same Joe-Kuo
//! direction numbers. Row `i` here is scipy's point `i + 1`.

use edpfill_core::lowdisc::{sample, sobol_integers, SamplerConfig, Scheme, SOBOL_MAX_DIMS};

const REFERENCE: [(usize, [u32; 32]); 3] = [
    (
        100,
        [
        3925868544, 3254779904, 1174405120, 973078528, 1644167168, 1040187392,
        2248146944, 4194304000, 570425344, 838860800, 4127195136, 771751936,
        4194304000, 1509949440, 3523215360, 4261412864, 771751936, 1040187392,
        1442840576, 3590324224, 1107296256, 3858759680, 2181038080, 4261412864,
        2248146944, 2181038080, 1912602624, 704643072, 3187671040, 973078528,
        905969664, 3925868544,
        ],
    ),
    (
        1000,
        [
        3091202048, 2562719744, 79691776, 759169024, 3351248896, 1749024768,
        2344615936, 1715470336, 4194304, 2445279232, 2512388096, 3242196992,
        2839543808, 3795845120, 2764046336, 3737124864, 943718400, 3628072960,
        2109734912, 968884224, 96468992, 213909504, 1933574144, 171966464,
        356515840, 1749024768, 2319450112, 2059403264, 2403336192, 3611295744,
        2780823552, 2772434944,
        ],
    ),
    (
        54321,
        [
        3564961792, 1462435840, 2073100288, 4050714624, 669450240, 3527868416,
        1869283328, 855965696, 2997420032, 1045495808, 1424162816, 2128805888,
        1569390592, 599588864, 3898802176, 410320896, 1622605824, 217513984,
        2454519808, 490143744, 1100939264, 3694460928, 483328000, 2024210432,
        3920035840, 189595648, 3790536704, 1793916928, 2151350272, 826867712,
        279642112, 2176516096,
        ],
    ),
];

#[test]
fn matches_reference_rows() {
    const { assert!(SOBOL_MAX_DIMS >= 32) };
    let ints = sobol_integers(54322, 32).unwrap();
    for (row, expected) in REFERENCE {
        assert_eq!(ints[row].as_slice(), expected.as_slice(), "row {row}");
    }
}

#[test]
fn floats_are_exact_scalings() {
    let cfg = SamplerConfig::new(Scheme::Sobol, 1001, 32, 0).unwrap();
    let pts = sample(&cfg).unwrap();
    let (_, expected) = REFERENCE[1];
    for (j, v) in expected.iter().enumerate() {
        assert_eq!(pts[(1000, j)], *v as f64 / 4_294_967_296.0);
    }
}

#[test]
fn every_prefix_of_two_power_length_is_balanced() {
    // Each coordinate of the first 2^k points (with the zero point) hits
    // every dyadic interval of width 2^-k exactly once.
    let ints = sobol_integers(1023, 32).unwrap();
    for dim in 0..32 {
        let mut seen = [false; 1024];
        seen[0] = true;
        for row in &ints {
            let bin = (row[dim] >> 22) as usize;
            assert!(!seen[bin], "dim {dim} bin {bin} hit twice");
            seen[bin] = true;
        }
    }
}
