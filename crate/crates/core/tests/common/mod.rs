//! Test support: a brute-force re-implementation of the coding pipeline that
//! shares no code with the library, plus seeded data generators.

#![allow(dead_code)]

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn words_of(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            out.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

pub fn content_words(text: &str, stop: &[&str]) -> Vec<String> {
    words_of(text)
        .into_iter()
        .filter(|w| !stop.contains(&w.as_str()))
        .collect()
}

pub fn light_stem(word: &str) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    while chars.len() > 2 && "aeiouàèéìòù".contains(chars[chars.len() - 1]) {
        chars.pop();
    }
    chars.into_iter().collect()
}

fn word_bigrams(words: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for w in words {
        let chars: Vec<char> = w.chars().collect();
        for i in 1..chars.len() {
            out.push(format!("{}{}", chars[i - 1], chars[i]));
        }
    }
    out
}

/// Quadratic matching of bigram lists.
pub fn pair_distance_words(a: &[String], b: &[String]) -> f64 {
    let left = word_bigrams(a);
    let right = word_bigrams(b);
    if left.is_empty() && right.is_empty() {
        return if a == b { 0.0 } else { 1.0 };
    }
    let mut used = vec![false; right.len()];
    let mut common = 0;
    for x in &left {
        for (j, y) in right.iter().enumerate() {
            if !used[j] && x == y {
                used[j] = true;
                common += 1;
                break;
            }
        }
    }
    1.0 - 2.0 * common as f64 / (left.len() + right.len()) as f64
}

pub fn pair_distance(a: &str, b: &str) -> f64 {
    pair_distance_words(&words_of(a), &words_of(b))
}

#[derive(Debug, Clone)]
pub struct OracleCandidate {
    pub index: usize,
    pub id: String,
    pub words: Vec<String>,
    pub voters: Vec<usize>,
    pub voted: Vec<usize>,
    pub stem: bool,
    pub c1: f64,
    pub c2: u8,
    pub c3: f64,
    pub c4: f64,
}

fn distinct(v: &[usize]) -> Vec<usize> {
    let mut d = v.to_vec();
    d.sort();
    d.dedup();
    d
}

/// Every term voted by the description, with its weights, in term order.
pub fn oracle_candidates(
    terms: &[(String, String)],
    stop: &[&str],
    text: &str,
) -> Vec<OracleCandidate> {
    let desc = content_words(text, stop);
    let mut out = Vec::new();
    for (index, (id, term_text)) in terms.iter().enumerate() {
        let words = content_words(term_text, stop);
        let mut voters = Vec::new();
        let mut voted = Vec::new();
        let mut stem = false;
        for (i, d) in desc.iter().enumerate() {
            if let Some(j) = words.iter().position(|w| w == d) {
                voters.push(i);
                voted.push(j);
            } else if let Some(j) = words.iter().position(|w| light_stem(w) == light_stem(d)) {
                voters.push(i);
                voted.push(j);
                stem = true;
            }
        }
        if voters.is_empty() {
            continue;
        }
        let matched = distinct(&voted).len();
        let rebuilt: Vec<String> = voters.iter().map(|&i| desc[i].clone()).collect();
        let lo = *voters.iter().min().unwrap();
        let hi = *voters.iter().max().unwrap();
        out.push(OracleCandidate {
            index,
            id: id.clone(),
            c1: (words.len() - matched) as f64 / words.len() as f64,
            c2: stem as u8,
            c3: pair_distance_words(&words, &rebuilt),
            c4: (hi - lo + 1) as f64 / matched as f64,
            words,
            voters,
            voted,
            stem,
        });
    }
    out
}

fn id_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        _ => a.cmp(b),
    }
}

fn starts_with(long: &[String], short: &[String]) -> bool {
    short.len() <= long.len() && long[..short.len()] == *short
}

/// Winner ids, in release order, capped at `n`.
pub fn oracle_winners(
    terms: &[(String, String)],
    stop: &[&str],
    text: &str,
    n: usize,
) -> Vec<String> {
    let desc_len = content_words(text, stop).len();
    let all = oracle_candidates(terms, stop, text);

    // ordered phrases
    let mut kept: Vec<OracleCandidate> = Vec::new();
    for c in &all {
        let shared = c.voters.iter().any(|v| {
            all.iter()
                .any(|o| o.index != c.index && o.voters.contains(v))
        });
        let mut pairs: Vec<(usize, usize)> = c
            .voters
            .iter()
            .copied()
            .zip(c.voted.iter().copied())
            .collect();
        pairs.sort();
        let disordered = (1..pairs.len()).any(|i| pairs[i].1 < pairs[i - 1].1);
        if !(shared && disordered) {
            kept.push(c.clone());
        }
    }

    kept.sort_by(|a, b| {
        a.c1.partial_cmp(&b.c1)
            .unwrap()
            .then(a.c2.cmp(&b.c2))
            .then(a.c3.partial_cmp(&b.c3).unwrap())
            .then(a.c4.partial_cmp(&b.c4).unwrap())
            .then(id_order(&a.id, &b.id))
            .then(a.index.cmp(&b.index))
    });

    let mut covered = vec![false; desc_len];
    let mut chosen: Vec<OracleCandidate> = Vec::new();
    for c in kept {
        let eligible = c.c1 == 0.0
            && c.c3 < 0.5
            && c.c4 < 3.0
            && !chosen.iter().any(|s| s.index == c.index)
            && !chosen.iter().any(|s| starts_with(&s.words, &c.words))
            && (!c.stem || c.voters.iter().any(|&v| !covered[v]));
        if !eligible {
            continue;
        }
        for &v in &c.voters {
            covered[v] = true;
        }
        chosen.retain(|s| !starts_with(&c.words, &s.words));
        chosen.push(c);
    }

    let mut result = Vec::new();
    for (i, c) in chosen.iter().enumerate() {
        let mine = distinct(&c.voters);
        let dominated = chosen.iter().enumerate().any(|(j, o)| {
            if i == j {
                return false;
            }
            let theirs = distinct(&o.voters);
            let subset = mine.iter().all(|v| theirs.contains(v));
            (subset && mine.len() < theirs.len()) || (mine == theirs && j < i)
        });
        if !dominated {
            result.push(c.id.clone());
        }
    }
    result.truncate(n);
    result
}

pub const TOY_STOP: [&str; 4] = ["di", "della", "il", "e"];

const ROOTS: [&str; 14] = [
    "fer", "dol", "man", "ten", "cap", "ros", "ped", "gon", "vesc", "lin", "cef", "tos", "bol",
    "ast",
];
const ENDINGS: [&str; 5] = ["a", "e", "i", "o", "ore"];

/// A small vocabulary whose words often share a light stem.
pub fn toy_vocabulary() -> Vec<String> {
    let mut v = Vec::new();
    for r in ROOTS {
        for e in ENDINGS {
            v.push(format!("{r}{e}"));
        }
    }
    v
}

pub struct ToyInstance {
    pub terms: Vec<(String, String)>,
    pub text: String,
}

/// Up to 30 terms of up to 4 words and a description of up to 12 words.
pub fn toy_instance(rng: &mut ChaCha8Rng) -> ToyInstance {
    let vocab = toy_vocabulary();
    // a narrower slice of the vocabulary per instance makes votes collide
    let slice: Vec<&String> = vocab.choose_multiple(rng, 12).collect();
    let n_terms = rng.gen_range(1..=30);
    let mut ids: Vec<u32> = (1000..1000 + 200).collect();
    ids.shuffle(rng);
    let mut terms = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for id in ids.iter().take(n_terms) {
        let len = rng.gen_range(1..=4);
        let mut parts: Vec<String> = Vec::new();
        for p in 0..len {
            if p > 0 && rng.gen_bool(0.2) {
                parts.push(TOY_STOP[rng.gen_range(0..TOY_STOP.len())].to_string());
            }
            parts.push(slice[rng.gen_range(0..slice.len())].clone());
        }
        let text = parts.join(" ");
        if seen.insert(text.clone()) {
            terms.push((id.to_string(), text));
        }
    }
    let n_words = rng.gen_range(0..=12);
    let mut words: Vec<String> = Vec::new();
    for _ in 0..n_words {
        match rng.gen_range(0..10) {
            0 => words.push(TOY_STOP[rng.gen_range(0..TOY_STOP.len())].to_string()),
            1 => words.push("zzz".to_string()),
            _ => words.push(slice[rng.gen_range(0..slice.len())].clone()),
        }
    }
    let sep = [" ", ", ", " - ", "; "];
    let mut text = String::new();
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            text.push_str(sep[rng.gen_range(0..sep.len())]);
        }
        text.push_str(w);
    }
    ToyInstance { terms, text }
}

/// Random lowercase string of up to `max_words` words of 1..=8 letters.
pub fn random_phrase(rng: &mut ChaCha8Rng, max_words: usize) -> String {
    let n = rng.gen_range(1..=max_words);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=8);
            (0..len)
                .map(|_| (b'a' + rng.gen_range(0..6u8)) as char)
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub struct SyntheticDictionary {
    pub rows: Vec<(String, String)>,
    pub vocabulary: Vec<String>,
    /// Cumulative Zipf weights over `vocabulary`.
    cumulative: Vec<f64>,
}

impl SyntheticDictionary {
    /// `terms` terms over `vocab` distinct words with Zipf-like frequencies;
    /// one term has exactly `max_len` words.
    pub fn generate(rng: &mut ChaCha8Rng, terms: usize, vocab: usize, max_len: usize) -> Self {
        let vocabulary: Vec<String> = (0..vocab).map(synthetic_word).collect();
        let mut cumulative = Vec::with_capacity(vocab);
        let mut total = 0.0;
        for rank in 1..=vocab {
            total += 1.0 / rank as f64;
            cumulative.push(total);
        }
        let mut dict = SyntheticDictionary {
            rows: Vec::with_capacity(terms),
            vocabulary,
            cumulative,
        };
        // every word used at least once so the vocabulary size is exact
        let mut pending: Vec<usize> = (0..vocab).collect();
        pending.shuffle(rng);
        for t in 0..terms {
            let len = if t == 0 {
                max_len
            } else {
                match rng.gen_range(0..100) {
                    0..=24 => 1,
                    25..=59 => 2,
                    60..=84 => 3,
                    85..=95 => 4,
                    _ => rng.gen_range(5..=max_len.min(8)),
                }
            };
            let mut words: Vec<&str> = Vec::with_capacity(len);
            for _ in 0..len {
                let w = match pending.pop() {
                    Some(i) => i,
                    None => dict.sample_index(rng),
                };
                words.push(&dict.vocabulary[w]);
            }
            let text = words.join(" ");
            dict.rows.push(((10_000_000 + t).to_string(), text));
        }
        dict
    }

    fn sample_index(&self, rng: &mut ChaCha8Rng) -> usize {
        let x = rng.gen::<f64>() * self.cumulative[self.cumulative.len() - 1];
        self.cumulative.partition_point(|&c| c < x)
    }

    pub fn sample_word(&self, rng: &mut ChaCha8Rng) -> &str {
        &self.vocabulary[self.sample_index(rng)]
    }

    /// Random words joined by spaces until the text reaches `chars` characters.
    pub fn description(&self, rng: &mut ChaCha8Rng, chars: usize) -> String {
        let mut text = String::new();
        while text.len() < chars {
            if !text.is_empty() {
                text.push(' ');
            }
            text.push_str(self.sample_word(rng));
        }
        text.truncate(chars);
        text
    }
}

/// Distinct pronounceable word for an index, ending in a vowel.
fn synthetic_word(mut i: usize) -> String {
    const CONS: &[u8] = b"bcdfglmnprstvz";
    const VOW: &[u8] = b"aeiou";
    let mut s = String::new();
    loop {
        s.push(CONS[i % CONS.len()] as char);
        i /= CONS.len();
        s.push(VOW[i % VOW.len()] as char);
        i /= VOW.len();
        if i == 0 {
            break;
        }
    }
    s
}
