//! Unscrambled Sobol' points checked against values frozen from an independent
//! Joe-Kuo implementation (scipy.stats.qmc.Sobol with scramble=False). Row `r`
//! of `sobol` is sequence index `r + 1`; the all-zero index 0 is skipped.

use minimax_design::lds::{scrambled_sobol, sobol, RngSeed, MAX_SOBOL_DIM};

const EIGHT_DIM: &[(usize, [f64; 8])] = &[
    (1, [0.5; 8]),
    (2, [0.75, 0.25, 0.25, 0.25, 0.75, 0.75, 0.25, 0.75]),
    (3, [0.25, 0.75, 0.75, 0.75, 0.25, 0.25, 0.75, 0.25]),
    (1000, [0.2197265625, 0.0966796875, 0.5185546875, 0.6767578125, 0.2802734375, 0.9072265625, 0.0458984375, 0.8994140625]),
    (1023, [0.0009765625, 0.7529296875, 0.6123046875, 0.1455078125, 0.1865234375, 0.4384765625, 0.1396484375, 0.6181640625]),
    (
        1024,
        [0.00146484375, 0.37646484375, 0.44775390625, 0.48681640625, 0.55712890625, 0.84423828125, 0.24169921875, 0.58740234375],
    ),
    (
        4095,
        [0.000244140625, 0.941162109375, 0.334228515625, 0.901611328125, 0.940185546875, 0.078857421875, 0.949462890625, 0.390869140625],
    ),
    (
        4096,
        [
            0.0003662109375,
            0.4705810546875,
            0.8358154296875,
            0.6204833984375,
            0.1649169921875,
            0.5428466796875,
            0.7086181640625,
            0.8367919921875,
        ],
    ),
];

#[test]
fn eight_dimensional_points_match_reference() {
    let pts = sobol(4096, 8).unwrap();
    for (index, want) in EIGHT_DIM {
        assert_eq!(pts.row(index - 1), &want[..], "index {index}");
    }
}

#[test]
fn highest_dimensions_match_reference() {
    assert_eq!(MAX_SOBOL_DIM, 1111);
    let pts = sobol(100, MAX_SOBOL_DIM).unwrap();
    let row = pts.row(99);
    for (d, want) in [(0, 0.4140625), (1, 0.2578125), (500, 0.1796875), (1000, 0.5703125), (1109, 0.2421875), (1110, 0.4609375)] {
        assert_eq!(row[d], want, "dimension {d}");
    }
}

#[test]
fn every_dyadic_interval_is_hit_once() {
    // the first 2^k points (with index 0 standing in for the skipped origin)
    // put exactly one point in each 1-d interval of width 2^-k
    let k = 10;
    let pts = sobol((1 << k) - 1, 5).unwrap();
    for d in 0..5 {
        let mut seen = vec![false; 1 << k];
        seen[0] = true;
        for r in pts.rows() {
            let cell = (r[d] * (1 << k) as f64) as usize;
            assert!(!seen[cell], "dimension {d} cell {cell} hit twice");
            seen[cell] = true;
        }
    }
}

#[test]
fn scrambled_points_keep_stratification_and_look_uniform() {
    let n = 1 << 12;
    let pts = scrambled_sobol(n, 4, RngSeed(11)).unwrap();
    for d in 0..4 {
        let mut counts = vec![0usize; 64];
        for r in pts.rows() {
            assert!((0.0..1.0).contains(&r[d]));
            counts[(r[d] * 64.0) as usize] += 1;
        }
        // one point per 2^-12 interval forces exactly 64 per 1/64 bin
        assert!(counts.iter().all(|&c| c == 64), "dimension {d}: {counts:?}");
        let mean = pts.rows().map(|r| r[d]).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 1e-3);
    }
    assert_ne!(pts, scrambled_sobol(n, 4, RngSeed(12)).unwrap());
}
