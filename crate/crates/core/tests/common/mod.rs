//! Reference data shared by the integration suites: the known-good
//! arrays and states the pipeline has to reproduce, plus small parsers.

#![allow(dead_code)]

use std::path::PathBuf;

use irmoa::moa::MixedArray;
use irmoa::qstate::{PureState, SystemShape};
use num_complex::Complex64;

pub fn kets(strs: &[&str]) -> Vec<Vec<u32>> {
    strs.iter()
        .map(|s| s.chars().map(|c| c.to_digit(10).unwrap()).collect())
        .collect()
}

pub fn array_from(strs: &[&str], alphabets: &[u32]) -> MixedArray {
    MixedArray::new(kets(strs), alphabets.to_vec()).unwrap()
}

/// Equal-weight superposition of the kets, with optional signs.
pub fn state_from(strs: &[&str], dims: &[u32], signs: Option<&[f64]>) -> PureState {
    let shape = SystemShape::new(dims.to_vec()).unwrap();
    let amp = 1.0 / (strs.len() as f64).sqrt();
    let terms = kets(strs)
        .into_iter()
        .enumerate()
        .map(|(i, k)| {
            let sign = signs.map(|s| s[i]).unwrap_or(1.0);
            (k, Complex64::new(sign * amp, 0.0))
        })
        .collect();
    PureState::from_terms(shape, terms).unwrap()
}

/// Path of the shipped scheme catalog at the workspace root.
pub fn catalog_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemes")
}

pub const IROA_4_23_ROWS: &[&str] = &["000", "011", "110", "101"];

pub const IRMOA_6_3421_ROWS: &[&str] = &["00000", "01211", "11120", "12001", "22210", "20121"];

pub const IRMOA_10_5621_ROWS: &[&str] = &[
    "0000000", "0123411", "1111120", "1234031", "2222240", "2340101", "3333310", "3401221",
    "4444430", "4012341",
];

/// Rows of the strength-2 array on 9 runs.
pub const IROA_9_34_ROWS: &[&str] = &[
    "0000", "0121", "0212", "1110", "1201", "1022", "2220", "2011", "2102",
];

/// Rows of the strength-2 array on 16 runs.
pub const IRMOA_16_4421_ROWS: &[&str] = &[
    "00000", "01231", "02310", "03121", "11110", "10321", "13200", "12031", "22220", "23011",
    "20130", "21301", "33330", "32101", "31020", "30211",
];

pub const MOA_4_4122: &[&str] = &["000", "101", "210", "311"];

pub const PHI_3421: &[&str] = &["00000", "01211", "11120", "12001", "22210", "20121"];

pub const PHI_5621: &[&str] = &[
    "0000000", "0123411", "1111120", "1234031", "2222240", "2340101", "3333310", "3401221",
    "4444430", "4012341",
];

pub const PHI_3721: &[&str] = &[
    "00000000", "00112211", "01022120", "01201201", "02121010", "02210121", "11111100", "11220011",
    "12100220", "12012001", "10202110", "10021221", "22222200", "22001111", "20211020", "20120101",
    "21010210", "21102021",
];

pub const PHI_51121: &[&str] = &[
    "000000000000",
    "001312243411",
    "012344012320",
    "013102434231",
    "020443231140",
    "024131302401",
    "031421420310",
    "032230144121",
    "043214321030",
    "044023113241",
    "111111111100",
    "112423304011",
    "123400123420",
    "124213040331",
    "131004342240",
    "130242413001",
    "142032031410",
    "143341200221",
    "104320432130",
    "100134224341",
    "222222222200",
    "223034410111",
    "234011234020",
    "230324101431",
    "242110403340",
    "241303024101",
    "203143142010",
    "204402311321",
    "210431043230",
    "211240330441",
    "333333333300",
    "334140021211",
    "340122340120",
    "341430212031",
    "303221014440",
    "302414130201",
    "314204203110",
    "310013422421",
    "321042104330",
    "322301441041",
    "444444444400",
    "440201132311",
    "401233401220",
    "402041323131",
    "414332120040",
    "413020241301",
    "420310314210",
    "421124033021",
    "432103210430",
    "433412002141",
];

pub const PHI_31321: &[&str] = &[
    "00000000000000",
    "00001122112211",
    "00110011222220",
    "00112222001101",
    "01020212210110",
    "01022021121021",
    "01201201201200",
    "01202110022111",
    "02121210102020",
    "02122101010201",
    "02210120211010",
    "02211002120121",
    "11111111111100",
    "11112200220011",
    "11221122000020",
    "11220000112201",
    "12101020021210",
    "12100102202121",
    "12012012012000",
    "12010221100211",
    "10202021210120",
    "10200212121001",
    "10021201022110",
    "10022110201221",
    "22222222222200",
    "22220011001111",
    "22002200111120",
    "22001111220001",
    "20212101102010",
    "20211210010221",
    "20120120120100",
    "20121002211011",
    "21010102021220",
    "21011020202101",
    "21102012100210",
    "21100221012021",
];

pub const PHI_3221: &[&str] = &["000", "011", "120", "101", "210", "221"];

pub const PHI_3521: &[&str] = &[
    "000000", "001121", "010220", "012011", "021210", "022101", "111110", "112201", "121000",
    "120121", "102020", "100211", "222220", "220011", "202110", "201201", "210100", "211021",
];

pub const PHI_44: &[&str] = &[
    "0000", "0123", "0231", "0312", "1111", "1032", "1320", "1203", "2222", "2301", "2013", "2130",
    "3333", "3210", "3102", "3021",
];

/// The signed 1-uniform state of one qutrit and two qubits (last ket minus).
pub const PHI_322_KETS: &[&str] = &["000", "011", "101", "110", "200", "211"];
pub const PHI_322_SIGNS: &[f64] = &[1.0, 1.0, 1.0, 1.0, 1.0, -1.0];

/// The local-relabel presentation of PHI_3221 used in the steering demo:
/// (|00>+|11>+|22>)|0> + (|01>+|12>+|20>)|1>.
pub const PHI_3221_STEERING: &[&str] = &["000", "110", "220", "011", "121", "201"];
