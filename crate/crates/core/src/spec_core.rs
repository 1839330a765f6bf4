//! Moduli specifications: connected components with small genus, labels,
//! relative degree `(d+, d-)` and the winding degrees of their boundaries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

pub type Label = String;
pub type LabelSet = BTreeSet<Label>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }

    pub fn parse(s: &str) -> Result<Sign> {
        match s.trim() {
            "+" | "+1" | "plus" => Ok(Sign::Plus),
            "-" | "-1" | "minus" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("bad sign {other:?}, expected + or -"))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Sign::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawLabel {
    Int(i64),
    Str(String),
}

fn de_labels<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<LabelSet, D::Error> {
    let raw = Vec::<RawLabel>::deserialize(d)?;
    let mut out = LabelSet::new();
    for r in raw {
        let l = match r {
            RawLabel::Int(i) => i.to_string(),
            RawLabel::Str(s) => s,
        };
        if !out.insert(l.clone()) {
            return Err(serde::de::Error::custom(format!("labels: duplicate label {l:?}")));
        }
    }
    Ok(out)
}

/// One connected component. `boundary` is kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpecComponent {
    pub gs: u32,
    #[serde(deserialize_with = "de_labels")]
    pub labels: LabelSet,
    pub d: (u32, u32),
    #[serde(default)]
    pub boundary: Vec<i64>,
}

impl SpecComponent {
    pub fn new(gs: u32, labels: LabelSet, d: (u32, u32), mut boundary: Vec<i64>) -> Self {
        boundary.sort_unstable();
        Self { gs, labels, d, boundary }
    }

    /// Genus-0 disk whose single boundary has degree `d+ - d-`.
    pub fn disk(labels: LabelSet, d: (u32, u32)) -> Self {
        Self::new(0, labels, d, vec![d.0 as i64 - d.1 as i64])
    }

    /// Closed genus-0 component of degree `d`, stored as `(d, d)`.
    pub fn sphere(labels: LabelSet, d: u32) -> Self {
        Self::new(0, labels, (d, d), vec![])
    }

    pub fn h(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary.is_empty()
    }

    /// `2 g_s + h - 1` for open components, `g_s` for closed ones.
    pub fn genus(&self) -> i64 {
        if self.is_closed() {
            self.gs as i64
        } else {
            2 * self.gs as i64 + self.h() as i64 - 1
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.gs as i64 - self.h() as i64
    }

    /// Sphere degree `max(d+, d-)`.
    pub fn sphere_degree(&self) -> u32 {
        self.d.0.max(self.d.1)
    }

    pub fn is_pure(&self) -> bool {
        !self.boundary.contains(&0)
    }

    pub fn positive_boundary_sum(&self) -> i64 {
        self.boundary.iter().filter(|&&b| b > 0).sum()
    }

    pub fn negative_boundary_sum(&self) -> i64 {
        self.boundary.iter().filter(|&&b| b < 0).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let mut sorted = self.boundary.clone();
        sorted.sort_unstable();
        if sorted != self.boundary {
            return Err(Error::InvalidSpec("boundary degrees must be sorted".into()));
        }
        let (dp, dm) = (self.d.0 as i64, self.d.1 as i64);
        let stab = 3 * (dp + dm) + 2 * self.gs as i64 + 2 * self.labels.len() as i64 + self.h() as i64;
        if stab <= 2 {
            return Err(Error::InvalidSpec(format!(
                "stability violated: 3(d+ + d-) + 2gs + 2|labels| + h = {stab} <= 2"
            )));
        }
        let lhs = dp - self.positive_boundary_sum();
        let rhs = dm + self.negative_boundary_sum();
        if lhs != rhs || lhs < 0 {
            return Err(Error::InvalidSpec(format!(
                "degree condition violated: d+ - (positive boundary sum) = {lhs}, \
                 d- + (negative boundary sum) = {rhs}; need equal and >= 0"
            )));
        }
        Ok(())
    }

    /// `prod_v m_v!` over boundary-degree multiplicities.
    pub fn boundary_aut_order(&self) -> u64 {
        multiplicity_factorials(self.boundary.iter())
    }
}

pub(crate) fn multiplicity_factorials<'a, T: Ord + 'a, I: Iterator<Item = &'a T>>(it: I) -> u64 {
    let mut counts: BTreeMap<&T, u64> = BTreeMap::new();
    for x in it {
        *counts.entry(x).or_insert(0) += 1;
    }
    counts.values().map(|&m| (1..=m).product::<u64>()).product()
}

impl fmt::Display for SpecComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.labels.iter().map(|s| s.as_str()).collect();
        write!(
            f,
            "(gs={}, {{{}}}, ({},{}), [{}])",
            self.gs,
            labels.join(","),
            self.d.0,
            self.d.1,
            self.boundary.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",")
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub struct ModuliSpec {
    pub components: Vec<SpecComponent>,
}

impl ModuliSpec {
    pub fn new(components: Vec<SpecComponent>) -> Self {
        Self { components }
    }

    pub fn single(c: SpecComponent) -> Self {
        Self { components: vec![c] }
    }

    pub fn labels(&self) -> LabelSet {
        self.components.iter().flat_map(|c| c.labels.iter().cloned()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = LabelSet::new();
        for (i, c) in self.components.iter().enumerate() {
            c.validate().map_err(|e| Error::InvalidSpec(format!("component {i}: {e}")))?;
            for l in &c.labels {
                if !seen.insert(l.clone()) {
                    return Err(Error::InvalidSpec(format!("label {l:?} appears in more than one component")));
                }
            }
        }
        Ok(())
    }

    pub fn is_pure(&self) -> bool {
        self.components.iter().all(SpecComponent::is_pure)
    }

    /// Components sorted, giving a canonical form for isomorphism tests.
    pub fn canonical(&self) -> ModuliSpec {
        let mut components = self.components.clone();
        for c in &mut components {
            c.boundary.sort_unstable();
        }
        components.sort();
        ModuliSpec { components }
    }

    pub fn aut_order(&self) -> u64 {
        let within: u64 = self.components.iter().map(|c| c.boundary_aut_order()).product();
        let label_free: Vec<SpecComponent> = self
            .components
            .iter()
            .filter(|c| c.labels.is_empty())
            .map(|c| {
                let mut c = c.clone();
                c.boundary.sort_unstable();
                c
            })
            .collect();
        within * multiplicity_factorials(label_free.iter())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.components.iter().map(|c| c.euler_characteristic()).sum()
    }

    pub fn total_degree(&self) -> (u32, u32) {
        self.components.iter().fold((0, 0), |acc, c| (acc.0 + c.d.0, acc.1 + c.d.1))
    }

    pub fn from_json(s: &str) -> Result<ModuliSpec> {
        let spec: ModuliSpec = parse_json(s, "spec")?;
        let spec = ModuliSpec {
            components: spec
                .components
                .into_iter()
                .map(|c| SpecComponent::new(c.gs, c.labels, c.d, c.boundary))
                .collect(),
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn validate_spec(s: &ModuliSpec) -> Result<()> {
    s.validate()
}

pub fn is_pure(s: &ModuliSpec) -> bool {
    s.is_pure()
}

pub fn spec_aut_order(s: &ModuliSpec) -> u64 {
    s.aut_order()
}

/// Descendent exponents and point constraints per label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub struct DescendentProblem {
    pub a: BTreeMap<Label, i64>,
    pub eps: BTreeMap<Label, Sign>,
}

impl DescendentProblem {
    pub fn new(a: BTreeMap<Label, i64>, eps: BTreeMap<Label, Sign>) -> Self {
        Self { a, eps }
    }

    /// Labels `names[i]` with exponents `a[i]` and constraints `eps[i]`.
    pub fn from_lists(names: &[Label], a: &[i64], eps: &[Sign]) -> Self {
        assert_eq!(names.len(), a.len());
        assert_eq!(names.len(), eps.len());
        Self {
            a: names.iter().cloned().zip(a.iter().copied()).collect(),
            eps: names.iter().cloned().zip(eps.iter().copied()).collect(),
        }
    }

    pub fn restrict(&self, labels: &LabelSet) -> DescendentProblem {
        Self {
            a: self.a.iter().filter(|(k, _)| labels.contains(*k)).map(|(k, v)| (k.clone(), *v)).collect(),
            eps: self.eps.iter().filter(|(k, _)| labels.contains(*k)).map(|(k, v)| (k.clone(), *v)).collect(),
        }
    }

    pub fn check_domain(&self, labels: &LabelSet) -> Result<()> {
        let a_keys: LabelSet = self.a.keys().cloned().collect();
        let e_keys: LabelSet = self.eps.keys().cloned().collect();
        if &a_keys != labels || &e_keys != labels {
            return Err(Error::InvalidProblem(format!("descendent data must cover exactly the labels {:?}", labels)));
        }
        Ok(())
    }

    pub fn total_a(&self) -> i64 {
        self.a.values().sum()
    }

    pub fn from_json(s: &str) -> Result<DescendentProblem> {
        parse_json(s, "problem")
    }
}

/// Deserializes `s`, naming the path of the offending field on failure.
pub fn parse_json<T: serde::de::DeserializeOwned>(s: &str, what: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(s);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse(format!("{what} JSON at `{path}`: {}", e.into_inner()))
    })
}

pub fn label_set<I: IntoIterator<Item = S>, S: Into<String>>(it: I) -> LabelSet {
    it.into_iter().map(Into::into).collect()
}
