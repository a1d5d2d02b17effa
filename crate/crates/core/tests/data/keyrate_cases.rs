// (N, V_m, loss dB, I_AB, Z, λ_1..λ_5, χ_BE) at η = 0.6, v_el = 0.05, ξ = 0.01.
#[allow(clippy::type_complexity)]
const CASES: &[(usize, f64, f64, f64, f64, [f64; 5], f64)] = &[
    (
        8,
        0.38,
        2.0,
        0.09542577624663483,
        0.7263377534111338,
        [
            1.1608091921172603,
            1.026882556464537,
            1.1514467434590157,
            1.0108111368756632,
            1.0,
        ],
        0.07228935343083648,
    ),
    (
        8,
        0.38,
        4.0,
        0.06097975671948885,
        0.5769505854806665,
        [
            1.2410923256245772,
            1.0163541221404413,
            1.2319577740253689,
            1.006738663700509,
            1.0,
        ],
        0.050807826316832005,
    ),
    (
        8,
        0.38,
        12.0,
        0.009847562763922055,
        0.22968816513489176,
        [
            1.3578562605236073,
            1.002463596958335,
            1.355608988811557,
            1.001049456159001,
            1.0,
        ],
        0.010269469111996332,
    ),
    (
        4,
        0.33,
        2.0,
        0.0832245511917654,
        0.669484779683613,
        [
            1.1396072210509751,
            1.02413271817424,
            1.1324840259019446,
            1.0097778287064318,
            1.0,
        ],
        0.06396094459088131,
    ),
    (
        4,
        0.33,
        4.0,
        0.053101842263325434,
        0.5317906632208589,
        [
            1.2093893518367282,
            1.014745789824919,
            1.2024615547939903,
            1.0061034616492144,
            1.0,
        ],
        0.04484296747517447,
    ),
    (
        4,
        0.33,
        12.0,
        0.008555664728097339,
        0.21170967626162387,
        [
            1.3107819552763975,
            1.0022345049887234,
            1.3090865865281573,
            1.0009525098948047,
            1.0,
        ],
        0.009081584348988314,
    ),
];
