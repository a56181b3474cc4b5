//! Published values for the four built-in families.

use mirrorpf_core::exact::{RatFunc, UniPoly};

type Frac = (&'static [i64], &'static [i64]);

/// `eps_1..eps_4` as (numerator, denominator) coefficients in `z`, lowest degree first.
const EPSILONS: [(u32, [Frac; 4]); 4] = [
    (5, [(&[1], &[-625, 625]), (&[-3], &[-25, 25]), (&[1], &[-1, 1]), (&[-2], &[-1, 1])]),
    (
        6,
        [(&[1], &[-1296, 324]), (&[-5], &[-72, 18]), (&[50, -1], &[-72, 18]), (&[-20, -1], &[-12, 3])],
    ),
    (
        8,
        [
            (&[1], &[-4096, 16]),
            (&[-3840, -15], &[-131072, 512]),
            (&[6400, -15], &[-16384, 64]),
            (&[-1280, -3], &[-1024, 4]),
        ],
    ),
    (
        10,
        [
            (&[5], &[-50000, 4]),
            (&[-37500, -7], &[-2500000, 200]),
            (&[62500, -7], &[-250000, 20]),
            (&[-12500, -1], &[-12500, 1]),
        ],
    ),
];

const LAMBDAS: [(u32, i64); 4] = [(5, 1), (6, 4), (8, 256), (10, 12500)];

const CURVES: [(u32, [&str; 5]); 4] = [
    (5, ["5", "2875", "609250", "317206375", "242467530000"]),
    (6, ["3", "7884", "6028452", "11900417220", "34600752005688"]),
    (8, ["2", "29504", "128834912", "1423720546880", "23193056024793312"]),
    (10, ["2", "462400", "24431571200", "3401788732948800", "700309317702649312000"]),
];

pub fn epsilons(k: u32) -> Option<[RatFunc; 4]> {
    let (_, fracs) = EPSILONS.iter().find(|(kk, _)| *kk == k)?;
    Some(fracs.map(|(n, d)| {
        RatFunc::normalize(UniPoly::from_i64(n), UniPoly::from_i64(d)).expect("nonzero denominator")
    }))
}

pub fn lambda(k: u32) -> Option<i64> {
    LAMBDAS.iter().find(|(kk, _)| *kk == k).map(|(_, l)| *l)
}

pub fn curves(k: u32) -> Option<[&'static str; 5]> {
    CURVES.iter().find(|(kk, _)| *kk == k).map(|(_, c)| *c)
}
