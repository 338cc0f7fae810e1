use std::collections::BTreeMap;

use super::{LanguageSample, RelationPresentation};
use crate::guards::rename_guard;

/// `(kept, dropped)` class ids when two distinct classes are united.
fn order(a: usize, b: usize) -> Option<(usize, usize)> {
    (a != b).then_some((a.min(b), a.max(b)))
}

/// Relabels class `from` as `to` in every entry.
fn relabel<'a>(values: impl Iterator<Item = &'a mut usize>, from: usize, to: usize) {
    for c in values {
        if *c == from {
            *c = to;
        }
    }
}

fn unite_loc(p: &mut RelationPresentation, w: usize, w2: usize) -> bool {
    match order(p.loc[w], p.loc[w2]) {
        Some((to, from)) => {
            relabel(p.loc.iter_mut(), from, to);
            true
        }
        None => false,
    }
}

fn unite_trans(p: &mut RelationPresentation, u: usize, u2: usize) -> bool {
    let (a, b) = (p.trans[&u], p.trans[&u2]);
    match order(a, b) {
        Some((to, from)) => {
            relabel(p.trans.values_mut(), from, to);
            true
        }
        None => false,
    }
}

fn unite_reg(p: &mut RelationPresentation, a: usize, b: usize) -> bool {
    match order(a, b) {
        Some((to, from)) => {
            relabel(p.reg.values_mut(), from, to);
            true
        }
        None => false,
    }
}

/// Puts words `w` and `w2` into one location class, without closure.
pub fn merge_locations(pres: &RelationPresentation, w: usize, w2: usize) -> RelationPresentation {
    let mut p = pres.clone();
    unite_loc(&mut p, w, w2);
    p.renumbered()
}

/// The least presentation relating everything either input relates.
pub fn join(a: &RelationPresentation, b: &RelationPresentation) -> RelationPresentation {
    let mut p = a.clone();
    let groups = |entries: Vec<(usize, usize)>| {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (k, c) in entries {
            out.entry(c).or_default().push(k);
        }
        out.into_values()
    };
    for members in groups(b.loc.iter().copied().enumerate().collect()) {
        for w in &members[1..] {
            unite_loc(&mut p, members[0], *w);
        }
    }
    for members in groups(b.trans.iter().map(|(k, c)| (*k, *c)).collect()) {
        for u in &members[1..] {
            unite_trans(&mut p, members[0], *u);
        }
    }
    // register entries only `b` has get ids disjoint from those of `a`
    let offset = a.reg.values().max().map_or(0, |m| m + 1);
    for (k, c) in &b.reg {
        p.reg.entry(*k).or_insert(c + offset);
    }
    let keys: Vec<(usize, u32)> = b.reg.keys().copied().collect();
    let mut by_class: BTreeMap<usize, Vec<(usize, u32)>> = BTreeMap::new();
    for k in keys {
        by_class.entry(b.reg[&k]).or_default().push(k);
    }
    for members in by_class.into_values() {
        for k in &members[1..] {
            let (x, y) = (p.reg[&members[0]], p.reg[k]);
            unite_reg(&mut p, x, y);
        }
    }
    p.renumbered()
}

/// Closes a presentation under the merges the conditions force: equal
/// renamed extensions of location equivalent words become transition
/// equivalent; transition equivalence merges the locations of the words and
/// of their prefixes; stored parameters and forwarded registers of
/// transition equivalent words merge register classes.
pub fn propagate(sample: &LanguageSample, pres: &RelationPresentation) -> RelationPresentation {
    let mut p = pres.clone();
    loop {
        let mut changed = false;
        for w in 0..sample.len() {
            for w2 in 0..sample.len() {
                if p.loc[w] != p.loc[w2] {
                    continue;
                }
                let Ok(sigma) = p.matching(sample, w, w2) else { continue };
                for u in sample.children(w) {
                    let (a, g) = sample.word(u).last().unwrap();
                    let Ok(renamed) = rename_guard(g, &sigma) else { continue };
                    for u2 in sample.children(w2) {
                        let (b, g2) = sample.word(u2).last().unwrap();
                        if a == b && *g2 == renamed {
                            changed |= unite_trans(&mut p, u, u2);
                        }
                    }
                }
            }
        }
        let nonempty: Vec<usize> = sample.nonempty().collect();
        for &u in &nonempty {
            for &u2 in &nonempty {
                if u == u2 || p.trans[&u] != p.trans[&u2] {
                    continue;
                }
                let (w, w2) = (sample.parent(u).unwrap(), sample.parent(u2).unwrap());
                changed |= unite_loc(&mut p, w, w2);
                changed |= unite_loc(&mut p, u, u2);
                let (m, n) = (sample.word(u).length() as u32, sample.word(u2).length() as u32);
                if let (Some(a), Some(b)) = (p.reg_class(u, m), p.reg_class(u2, n)) {
                    changed |= unite_reg(&mut p, a, b);
                }
                let forwarded: Vec<(u32, usize)> = p.stored(w).collect();
                for (v, class) in forwarded {
                    let Some(v2) = p.marker_in_class(w2, class) else { continue };
                    if let (Some(a), Some(b)) = (p.reg_class(u, v), p.reg_class(u2, v2)) {
                        changed |= unite_reg(&mut p, a, b);
                    }
                }
            }
        }
        if !changed {
            return p.renumbered();
        }
    }
}
