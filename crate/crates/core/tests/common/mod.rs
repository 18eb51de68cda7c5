#![allow(dead_code)]

use toda_pencil::pencil::DenseMatrix;
use toda_pencil::scalar::Rational;

pub fn r(s: &str) -> Rational {
    Rational::parse(s).unwrap()
}

pub fn rv(items: &[&str]) -> Vec<Rational> {
    items.iter().map(|s| r(s)).collect()
}

pub fn matrix(rows: &[&[&str]]) -> DenseMatrix<Rational> {
    DenseMatrix::from_rows(rows.iter().map(|row| rv(row)).collect())
}

/// Reference outputs of the bidiagonal example (`q = 1..5`, `e = 6..9`).
pub mod bidiagonal {
    pub const Q_HAT: [&str; 5] = ["7", "620/63", "41949/5890", "5722439/7639379", "98340/301181"];
    pub const E_HAT: [&str; 4] = ["54/7", "931/90", "4720320/2745329", "90306875/493635659"];
    pub const T_HAT: [&[&str]; 5] = [
        &["7", "1", "0", "0", "0"],
        &["54", "158/9", "1", "0", "0"],
        &["0", "8246/81", "92590/5301", "1", "0"],
        &["0", "0", "4248288/346921", "2382991/965371", "1"],
        &["0", "0", "0", "368125/2686321", "835/1639"],
    ];
    pub const EIGENVALUES: [&str; 5] = ["29.10515103", "12.22484344", "2.82190399", "0.17848385", "0.66961769"];
}

/// Reference data of the tridiagonal example (`N = 6`, mask `(1,1,1,0,0)`).
pub mod tridiagonal {
    pub const A: [&[&str]; 6] = [
        &["1", "1", "0", "0", "0", "0"],
        &["0", "2", "1", "0", "0", "0"],
        &["0", "0", "3", "1", "0", "0"],
        &["0", "0", "0", "4", "1", "0"],
        &["0", "0", "0", "40", "15", "1"],
        &["0", "0", "0", "0", "55", "17"],
    ];
    pub const B: [&[&str]; 6] = [
        &["1", "0", "0", "0", "0", "0"],
        &["-7", "1", "0", "0", "0", "0"],
        &["0", "-8", "1", "0", "0", "0"],
        &["0", "0", "-9", "1", "0", "0"],
        &["0", "0", "0", "0", "1", "0"],
        &["0", "0", "0", "0", "0", "1"],
    ];
    pub const Q_HAT: [&str; 6] = [
        "8",
        "217/20",
        "13150/1953",
        "3924423/614105",
        "2596480772/1515844721",
        "156435/1389979",
    ];
    pub const E_HAT: [&str; 5] = [
        "35/4",
        "5184/1085",
        "101339/11835",
        "685706750/67877983",
        "119912925/14496090991",
    ];
    pub const T_HAT: [&[&str]; 6] = [
        &["8", "1", "0", "0", "0", "0"],
        &["70", "98/5", "1", "0", "0", "0"],
        &["0", "1296/25", "518/45", "1", "0", "0"],
        &["0", "0", "4670/81", "62848/4203", "1", "0"],
        &["0", "0", "0", "14079150/218089", "57542826/4870343", "1"],
        &["0", "0", "0", "0", "1541100/108764041", "1260/10429"],
    ];
    pub const EIGENVALUES: [&str; 6] = [
        "28.1051142",
        "22.50730913",
        "10.85981143",
        "4.18583949",
        "0.23568694",
        "0.10623881",
    ];
}

/// Reference data of the Hessenberg example (`N = 6`, `M = 3`).
pub mod hessenberg {
    /// The product of the input factors, recomputed from the factors.
    /// Row 0 carries 18 in column 1.
    pub const A: [&[&str]; 6] = [
        &["6", "18", "9", "1", "0", "0"],
        &["0", "24", "36", "12", "1", "0"],
        &["0", "0", "60", "60", "15", "1"],
        &["0", "0", "0", "120", "90", "18"],
        &["0", "0", "0", "1200", "1110", "306"],
        &["0", "0", "0", "0", "2310", "1722"],
    ];
    pub const R_HAT: [[&str; 6]; 3] = [
        [
            "8",
            "1045/196",
            "11783226/1951015",
            "11202591839/1537751072",
            "1793288934976/673133562011",
            "3365490/23369591",
        ],
        [
            "43/4",
            "249816/44935",
            "4459329545/417182311",
            "281563249429787/25605158734417",
            "61342417293160530/164176201497170723",
            "654348548/340773203",
        ],
        [
            "570/43",
            "5738006/988855",
            "2131337471900/284718590021",
            "417593915190317388/71923747531523615",
            "5065558609120017904/2778977782301483047",
            "340773203/103007824",
        ],
    ];
    pub const L_HAT: [&str; 5] = [
        "686/95",
        "17736500/3269329",
        "92158247808/19114261985",
        "393943905477395/312887922561632",
        "448520531195/11555726719792",
    ];
    pub const H_HAT: [&[&str]; 6] = [
        &["1140", "11898/49", "46404/1867", "1", "0", "0"],
        &["8232", "94344/49", "581274/1867", "1189329/38368", "1", "0"],
        &["0", "2240400/2401", "109654800/91483", "646077099/1880032", "146061709/5496967", "1"],
        &["0", "0", "8121738240/3485689", "26863943637/17908264", "2245552524/12320333", "20808/1867"],
        &["0", "0", "0", "215519585169/368025856", "110756457399/1076059336", "44037/4796"],
        &["0", "0", "0", "0", "886300800/12585025489", "107940/112183"],
    ];
    pub const EIGENVALUES: [&str; 6] = [
        "3188.27018",
        "2167.22313",
        "485.176601",
        "25.4359335",
        "1.14466512",
        "0.749495172",
    ];
}

/// Checks sorted `found` roots against decimal strings at their stated
/// precision: within one unit of the last stated digit.
pub fn matches_decimals(found: &[f64], reference: &[&str]) -> Result<(), String> {
    let mut expected: Vec<(f64, f64)> = reference
        .iter()
        .map(|s| {
            let decimals = s.split('.').nth(1).map_or(0, str::len);
            (s.parse::<f64>().unwrap(), 10f64.powi(-(decimals as i32)))
        })
        .collect();
    expected.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    if found.len() != expected.len() {
        return Err(format!("found {} roots, expected {}", found.len(), expected.len()));
    }
    for (x, (v, unit)) in found.iter().zip(&expected) {
        if (x - v).abs() > *unit {
            return Err(format!("root {x} vs reference {v} (unit {unit})"));
        }
    }
    Ok(())
}
