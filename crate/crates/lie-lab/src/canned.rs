//! Canned example library, embedded from `canned/*.alg`.

use crate::format::AlgebraFile;

pub const CANNED: &[(&str, &str)] = &[
    ("abelian_r3", include_str!("../canned/abelian_r3.alg")),
    ("heis_carnot", include_str!("../canned/heis_carnot.alg")),
    (
        "heis_carnot_linf",
        include_str!("../canned/heis_carnot_linf.alg"),
    ),
    ("heis_riem", include_str!("../canned/heis_riem.alg")),
    ("n521", include_str!("../canned/n521.alg")),
    ("n521_v1v3", include_str!("../canned/n521_v1v3.alg")),
    ("n522", include_str!("../canned/n522.alg")),
    ("n522_x_n521", include_str!("../canned/n522_x_n521.alg")),
    (
        "heis_x_n521_v13",
        include_str!("../canned/heis_x_n521_v13.alg"),
    ),
];

pub fn names() -> Vec<&'static str> {
    CANNED.iter().map(|(n, _)| *n).collect()
}

pub fn text(name: &str) -> Option<&'static str> {
    CANNED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
}

pub fn load(name: &str) -> Option<AlgebraFile> {
    text(name).map(|t| AlgebraFile::parse(t).expect("canned files parse"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_canned_files_parse() {
        for (name, text) in CANNED {
            let f = AlgebraFile::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(f.name.as_deref(), Some(*name));
        }
    }

    #[test]
    fn canned_round_trips() {
        for (name, text) in CANNED {
            let f = AlgebraFile::parse(text).unwrap();
            let g = AlgebraFile::parse(&f.serialize()).unwrap();
            assert_eq!(f, g, "{name}");
        }
    }
}
