//! Seeded generator for a small synthetic policy corpus.
//!
//! The corpus has 40 policies per year over 2015..=2019. Text mixes
//! template sentences, markdown headings, list items and table rows, plus
//! negated sentences that the cleaning step should drop. Three terms follow
//! fixed yearly totals so the turbulence rules have something to find:
//! "biometric" rises, "beacons" falls, "geolocation" emerges in 2018.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::ingest::PolicySnapshot;
use crate::seed::rng_for;

pub const MINI_YEARS: [i32; 5] = [2015, 2016, 2017, 2018, 2019];
pub const POLICIES_PER_YEAR: usize = 40;

/// Yearly totals of the scheduled terms, aligned with `MINI_YEARS`.
pub const SCHEDULES: [(&str, [u32; 5]); 3] = [
    ("biometric", [3, 8, 30, 90, 160]),
    ("beacons", [180, 120, 90, 60, 40]),
    ("geolocation", [0, 0, 0, 35, 70]),
];

const PII: &[&str] = &[
    "name",
    "email address",
    "postal address",
    "telephone number",
    "cookies",
    "password",
    "age",
    "gender",
    "location",
    "browsing history",
    "preferences",
    "interests",
    "household",
    "employment",
    "education",
    "health",
    "fingerprint",
    "voice",
    "ip address",
    "family",
];

const VERBS: &[&str] = &["collect", "use", "store", "process", "retain", "receive", "record", "keep"];

const WHEN: &[&str] = &[
    "when you create an account",
    "when you visit our site",
    "when you contact support",
    "when you place an order",
    "when you sign up for our newsletter",
    "when you take part in a survey",
    "while you browse our pages",
    "each time you log in",
];

const PURPOSE: &[&str] = &[
    "to provide our services",
    "to improve the site",
    "to personalize content",
    "to measure advertising",
    "to prevent fraud",
    "to comply with legal obligations",
    "to send you updates",
    "to keep your account secure",
    "for analytics",
    "for customer support",
];

const PARTY: &[&str] = &[
    "service providers",
    "advertising partners",
    "analytics vendors",
    "our affiliates",
    "payment processors",
    "law enforcement when required",
];

const HEADINGS: &[&str] = &[
    "## What We Collect",
    "## How We Use Data",
    "## Sharing",
    "## Your Choices",
    "## Security",
    "## Contact Us",
];

const CATEGORIES: &[Option<&str>] = &[
    Some("news"),
    Some("shopping"),
    Some("health"),
    Some("finance"),
    Some("education"),
    None,
];

/// Terms each category mentions most, aligned with `CATEGORIES`. Sites
/// without a category draw from the whole list.
const FOCUS: &[&[&str]] = &[
    &["cookies", "browsing history", "interests", "preferences", "location", "ip address"],
    &["postal address", "telephone number", "name", "email address", "cookies", "password"],
    &["health", "age", "gender", "family", "fingerprint", "voice"],
    &["employment", "household", "name", "password", "telephone number", "postal address"],
    &["education", "age", "interests", "family", "name", "email address"],
    PII,
];

fn pick<R: Rng>(focus: &[&'static str], rng: &mut R) -> &'static str {
    let pool = if rng.random_bool(0.8) { focus } else { PII };
    pool.choose(rng).copied().unwrap()
}

fn positive(focus: &[&'static str], rng: &mut impl Rng) -> String {
    let pii = pick(focus, rng);
    match rng.random_range(0..5) {
        0 => format!(
            "We {} your {} {}.",
            VERBS.choose(rng).unwrap(),
            pii,
            WHEN.choose(rng).unwrap()
        ),
        1 => format!(
            "We may share your {} and {} with {} {}.",
            pii,
            pick(focus, rng),
            PARTY.choose(rng).unwrap(),
            PURPOSE.choose(rng).unwrap()
        ),
        2 => format!("Your {} is used {}.", pii, PURPOSE.choose(rng).unwrap()),
        3 => format!(
            "{} may {} {} {}.",
            capitalize(PARTY.choose(rng).unwrap()),
            VERBS.choose(rng).unwrap(),
            pii,
            PURPOSE.choose(rng).unwrap()
        ),
        _ => format!("You can update your {} at any time.", pii),
    }
}

fn negated(rng: &mut impl Rng) -> String {
    let pii = PII.choose(rng).unwrap();
    match rng.random_range(0..4) {
        0 => format!("We do not sell your {pii}."),
        1 => format!("We never share your {pii} with {}.", PARTY.choose(rng).unwrap()),
        2 => format!("We won't {} your {pii} without consent.", VERBS.choose(rng).unwrap()),
        _ => format!("Nothing in this policy lets us sell {pii}."),
    }
}

fn scheduled(term: &str, rng: &mut impl Rng) -> String {
    match rng.random_range(0..3) {
        0 => format!("We {} {} data {}.", VERBS.choose(rng).unwrap(), term, WHEN.choose(rng).unwrap()),
        1 => format!("Our partners use {} {}.", term, PURPOSE.choose(rng).unwrap()),
        _ => format!("Some features rely on {term} signals."),
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn policy_text(focus: &[&'static str], extra: &[String], rng: &mut impl Rng) -> String {
    let mut sentences: Vec<(bool, String)> = (0..rng.random_range(8..14))
        .map(|_| (false, positive(focus, rng)))
        .collect();
    for _ in 0..rng.random_range(1..4) {
        sentences.push((false, negated(rng)));
    }
    for s in extra {
        sentences.push((true, s.clone()));
    }
    // Scheduled sentences are placed at random positions.
    for i in (1..sentences.len()).rev() {
        let j = rng.random_range(0..=i);
        sentences.swap(i, j);
    }
    let mut out = String::from("# Privacy Policy\n\n");
    let mut i = 0;
    while i < sentences.len() {
        let n = rng.random_range(2..5).min(sentences.len() - i);
        match rng.random_range(0..6) {
            0 => out.push_str(&format!("{}\n\n", HEADINGS.choose(rng).unwrap())),
            1 => out.push_str("| Category | Purpose |\n| --- | --- |\n\n"),
            _ => {}
        }
        if rng.random_bool(0.25) {
            for (_, s) in &sentences[i..i + n] {
                out.push_str("- ");
                out.push_str(s);
                out.push('\n');
            }
        } else {
            let para: Vec<&str> = sentences[i..i + n].iter().map(|(_, s)| s.as_str()).collect();
            out.push_str(&para.join(" "));
            out.push('\n');
        }
        out.push('\n');
        i += n;
    }
    out.truncate(out.trim_end().len());
    out.push('\n');
    out
}

/// Generate the synthetic corpus. Same seed, same corpus.
pub fn mini_corpus(seed: u64) -> Vec<PolicySnapshot> {
    let mut out = Vec::with_capacity(MINI_YEARS.len() * POLICIES_PER_YEAR);
    for (yi, &year) in MINI_YEARS.iter().enumerate() {
        let mut rng = rng_for(seed, &format!("synth:{year}"));
        let mut extra: Vec<Vec<String>> = vec![Vec::new(); POLICIES_PER_YEAR];
        for (term, totals) in SCHEDULES {
            for _ in 0..totals[yi] {
                let d = rng.random_range(0..POLICIES_PER_YEAR);
                let s = scheduled(term, &mut rng);
                extra[d].push(s);
            }
        }
        for (site, extra) in extra.iter().enumerate() {
            out.push(PolicySnapshot {
                id: format!("{year}-{site:03}"),
                url: format!("https://site{site:03}.example.com/privacy"),
                year,
                category: CATEGORIES[site % CATEGORIES.len()].map(str::to_string),
                text: policy_text(FOCUS[site % FOCUS.len()], extra, &mut rng),
            });
        }
    }
    out
}
