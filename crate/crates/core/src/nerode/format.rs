//! Text formats. A sample file is a `depth: k` header followed by one
//! symbolic word per line; words are referred to by their 0-based position.
//! A presentation file has `[loc]`, `[trans]` and `[reg]` sections with lines
//! `word -> class` (`word:v<i> -> class` under `[reg]`). `#` starts a comment.

use std::fmt::Write as _;

use super::{LanguageSample, NerodeError, RelationPresentation};
use crate::guards::Theory;
use crate::symbolic::SymbolicWord;

fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub fn parse_sample(text: &str, th: &dyn Theory) -> Result<LanguageSample, NerodeError> {
    let mut depth = None;
    let mut words = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let err = |message: String| NerodeError::SampleParse { line: n + 1, message };
        let line = strip(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("depth:") {
            let k = rest.trim().parse::<usize>().map_err(|e| err(format!("bad depth: {e}")))?;
            if depth.replace(k).is_some() {
                return Err(err("duplicate depth header".into()));
            }
            continue;
        }
        words.push(SymbolicWord::parse(line).map_err(|e| err(e.to_string()))?);
    }
    let depth = depth.ok_or(NerodeError::SampleParse { line: 1, message: "missing `depth:` header".into() })?;
    LanguageSample::new(depth, words, th)
}

pub fn print_sample(sample: &LanguageSample) -> String {
    let mut out = format!("depth: {}\n", sample.depth());
    for (i, w) in sample.words().iter().enumerate() {
        let _ = writeln!(out, "{w}  # {i}");
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Loc,
    Trans,
    Reg,
}

pub fn parse_presentation(text: &str, sample: &LanguageSample) -> Result<RelationPresentation, NerodeError> {
    let mut section = None;
    let mut loc: Vec<Option<usize>> = vec![None; sample.len()];
    let mut pres = RelationPresentation::default();
    for (n, raw) in text.lines().enumerate() {
        let err = |message: String| NerodeError::PresentationParse { line: n + 1, message };
        let line = strip(raw);
        if line.is_empty() {
            continue;
        }
        match line {
            "[loc]" => section = Some(Section::Loc),
            "[trans]" => section = Some(Section::Trans),
            "[reg]" => section = Some(Section::Reg),
            _ => {
                let section = section.ok_or_else(|| err("entry before any section header".into()))?;
                let (key, class) = line.split_once("->").ok_or_else(|| err("expected `key -> class`".into()))?;
                let class: usize = class.trim().parse().map_err(|_| err(format!("bad class id {:?}", class.trim())))?;
                let word = |s: &str| -> Result<usize, NerodeError> {
                    let i: usize = s.trim().parse().map_err(|_| err(format!("bad word index {:?}", s.trim())))?;
                    if i >= sample.len() {
                        return Err(err(format!("word index {i} outside the sample")));
                    }
                    Ok(i)
                };
                let duplicate = || err(format!("duplicate entry {:?}", key.trim()));
                match section {
                    Section::Loc => {
                        let i = word(key)?;
                        if loc[i].replace(class).is_some() {
                            return Err(duplicate());
                        }
                    }
                    Section::Trans => {
                        if pres.trans.insert(word(key)?, class).is_some() {
                            return Err(duplicate());
                        }
                    }
                    Section::Reg => {
                        let (w, v) = key.split_once(':').ok_or_else(|| err("expected `word:v<i>`".into()))?;
                        let v: u32 = v
                            .trim()
                            .strip_prefix('v')
                            .and_then(|k| k.parse().ok())
                            .ok_or_else(|| err(format!("bad marker {:?}", v.trim())))?;
                        if pres.reg.insert((word(w)?, v), class).is_some() {
                            return Err(duplicate());
                        }
                    }
                }
            }
        }
    }
    pres.loc = loc
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| NerodeError::Presentation(format!("word {i} has no location class"))))
        .collect::<Result<_, _>>()?;
    pres.validate(sample)?;
    Ok(pres)
}

pub fn print_presentation(sample: &LanguageSample, pres: &RelationPresentation) -> String {
    let mut out = String::from("[loc]\n");
    for (i, c) in pres.loc.iter().enumerate() {
        let _ = writeln!(out, "{i} -> {c}  # {}", sample.word(i));
    }
    out.push_str("[trans]\n");
    for (i, c) in &pres.trans {
        let _ = writeln!(out, "{i} -> {c}  # {}", sample.word(*i));
    }
    out.push_str("[reg]\n");
    for ((i, v), c) in &pres.reg {
        let _ = writeln!(out, "{i}:v{v} -> {c}");
    }
    out
}
