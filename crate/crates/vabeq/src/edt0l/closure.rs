//! Closure operations on EDT0L systems: union, concatenation, Kleene star,
//! free-monoid homomorphic images, intersection with regular languages,
//! terminal fixing, and separator-symbol splitting.
//!
//! Systems are combined by merging alphabets by letter name: terminal
//! letters with equal names are identified, extended letters are renamed
//! apart. Concatenation and star first pass through [`fix_terminals`] so
//! that finished terminal letters are inert under the other operand's (or
//! later iterations') control.

use super::{
    Alphabet, ControlAutomaton, Edt0lError, Edt0lSystem, Endomorphism, Letter, LetterWord,
};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

/// Finite automaton over terminal letter names with a single accept state.
#[derive(Clone, Debug)]
pub struct WordAutomaton {
    pub states: usize,
    pub start: usize,
    pub accept: usize,
    pub edges: Vec<(usize, String, usize)>,
}

impl WordAutomaton {
    fn validate(&self) -> Result<(), Edt0lError> {
        if self.start >= self.states || self.accept >= self.states {
            return Err(Edt0lError::BadWordAutomaton {
                reason: "start or accept state out of range".into(),
            });
        }
        for (f, _, t) in &self.edges {
            if *f >= self.states || *t >= self.states {
                return Err(Edt0lError::BadWordAutomaton {
                    reason: format!("edge ({f},{t}) out of range"),
                });
            }
        }
        Ok(())
    }
}

/// Merge `src`'s letters into the destination alphabet, returning the id
/// remap. Terminals are identified by name; extended letters always get a
/// fresh id (renamed apart when their name is taken). A terminal name held
/// by an extended letter in the destination evicts that letter to a primed
/// name: terminal names are never renamed.
fn merge_letters(
    alphabet: &mut Alphabet,
    terminals: &mut BTreeSet<Letter>,
    src: &Edt0lSystem,
) -> Vec<Letter> {
    let mut remap = Vec::with_capacity(src.alphabet.len());
    for (raw, name) in src.alphabet.names().iter().enumerate() {
        let id = raw as Letter;
        if src.terminals.contains(&id) {
            if let Some(existing) = alphabet.lookup(name) {
                if !terminals.contains(&existing) {
                    alphabet.rename_fresh(existing, &format!("{name}'"));
                }
            }
            let new = alphabet.intern(name);
            terminals.insert(new);
            remap.push(new);
        } else {
            remap.push(alphabet.intern_fresh(name));
        }
    }
    remap
}

/// Union of two languages: fresh start symbol seeded to either operand's
/// start word, control components side by side.
pub fn union(a: &Edt0lSystem, b: &Edt0lSystem) -> Edt0lSystem {
    let mut alphabet = a.alphabet.clone();
    let mut terminals = a.terminals.clone();
    let remap_b = merge_letters(&mut alphabet, &mut terminals, b);
    let seed = alphabet.intern_fresh("@u");

    let mut endos = a.endos.clone();
    let b_endo_offset = endos.len();
    endos.extend(b.endos.iter().map(|e| e.remap(|c| remap_b[c as usize])));
    let seed_a = endos.len();
    endos.push(Endomorphism::from_pairs([(seed, a.start_word.clone())]));
    let seed_b = endos.len();
    endos.push(Endomorphism::from_pairs([(
        seed,
        b.start_word.iter().map(|&c| remap_b[c as usize]).collect::<LetterWord>(),
    )]));

    let a_off = 1;
    let b_off = 1 + a.control.states;
    let states = 1 + a.control.states + b.control.states;
    let mut edges = vec![
        (0, seed_a, a_off + a.control.start),
        (0, seed_b, b_off + b.control.start),
    ];
    edges.extend(a.control.edges.iter().map(|&(f, e, t)| (f + a_off, e, t + a_off)));
    edges.extend(
        b.control
            .edges
            .iter()
            .map(|&(f, e, t)| (f + b_off, e + b_endo_offset, t + b_off)),
    );
    let accepts = a
        .control
        .accepts
        .iter()
        .map(|&s| s + a_off)
        .chain(b.control.accepts.iter().map(|&s| s + b_off))
        .collect();

    Edt0lSystem {
        alphabet,
        terminals,
        start_word: vec![seed],
        endos,
        control: ControlAutomaton { states, start: 0, accepts, edges },
    }
}

fn fix_terminals_with_bars(h: &Edt0lSystem) -> (Edt0lSystem, BTreeMap<Letter, Letter>) {
    let mut alphabet = h.alphabet.clone();
    let mut bars: BTreeMap<Letter, Letter> = BTreeMap::new();
    for &t in &h.terminals {
        let name = format!("{}~", alphabet.name(t));
        let barred = alphabet.intern_fresh(&name);
        bars.insert(t, barred);
    }
    let bar_word = |w: &[Letter]| -> LetterWord {
        w.iter().map(|c| *bars.get(c).unwrap_or(c)).collect()
    };
    let mut endos: Vec<Endomorphism> = h
        .endos
        .iter()
        .map(|e| {
            let mut map = BTreeMap::new();
            for (&c, img) in &e.map {
                let key = *bars.get(&c).unwrap_or(&c);
                map.insert(key, bar_word(img));
            }
            Endomorphism { map }
        })
        .collect();
    let theta = endos.len();
    endos.push(Endomorphism {
        map: bars.iter().map(|(&t, &b)| (b, vec![t])).collect(),
    });
    let final_state = h.control.states;
    let mut edges = h.control.edges.clone();
    for &acc in &h.control.accepts {
        edges.push((acc, theta, final_state));
    }
    let system = Edt0lSystem {
        alphabet,
        terminals: h.terminals.clone(),
        start_word: bar_word(&h.start_word),
        endos,
        control: ControlAutomaton {
            states: h.control.states + 1,
            start: h.control.start,
            accepts: [final_state].into_iter().collect(),
            edges,
        },
    };
    (system, bars)
}

/// Language-equivalent system in which every control endomorphism fixes
/// every terminal letter: terminals are shadowed by barred copies that are
/// unbarred by a final substitution.
pub fn fix_terminals(h: &Edt0lSystem) -> Edt0lSystem {
    fix_terminals_with_bars(h).0
}

/// Concatenation; both operands are made terminal-fixing first so the
/// finished halves are inert under the other control.
pub fn concat(a: &Edt0lSystem, b: &Edt0lSystem) -> Edt0lSystem {
    let fa = fix_terminals(a);
    let fb = fix_terminals(b);
    let mut alphabet = fa.alphabet.clone();
    let mut terminals = fa.terminals.clone();
    let remap_b = merge_letters(&mut alphabet, &mut terminals, &fb);

    let mut endos = fa.endos.clone();
    let b_endo_offset = endos.len();
    endos.extend(fb.endos.iter().map(|e| e.remap(|c| remap_b[c as usize])));
    let bridge = endos.len();
    endos.push(Endomorphism::identity());

    let b_off = fa.control.states;
    let states = fa.control.states + fb.control.states;
    let mut edges = fa.control.edges.clone();
    edges.extend(
        fb.control
            .edges
            .iter()
            .map(|&(f, e, t)| (f + b_off, e + b_endo_offset, t + b_off)),
    );
    for &acc in &fa.control.accepts {
        edges.push((acc, bridge, b_off + fb.control.start));
    }
    let accepts = fb.control.accepts.iter().map(|&s| s + b_off).collect();
    let mut start_word = fa.start_word.clone();
    start_word.extend(fb.start_word.iter().map(|&c| remap_b[c as usize]));

    Edt0lSystem {
        alphabet,
        terminals,
        start_word,
        endos,
        control: ControlAutomaton { states, start: fa.control.start, accepts, edges },
    }
}

/// Kleene star: a fresh symbol spawns one copy of the (terminal-fixed)
/// start word per loop and is erased at the end.
pub fn star(a: &Edt0lSystem) -> Edt0lSystem {
    let f = fix_terminals(a);
    let mut alphabet = f.alphabet.clone();
    let seed = alphabet.intern_fresh("@s");
    let mut endos = f.endos.clone();
    let spawn = endos.len();
    let mut spawn_image = f.start_word.clone();
    spawn_image.push(seed);
    endos.push(Endomorphism::from_pairs([(seed, spawn_image)]));
    let finish = endos.len();
    endos.push(Endomorphism::from_pairs([(seed, Vec::new())]));

    let s0 = f.control.states;
    let fin = s0 + 1;
    let mut edges = f.control.edges.clone();
    edges.push((s0, spawn, f.control.start));
    edges.push((s0, finish, fin));
    for &acc in &f.control.accepts {
        edges.push((acc, spawn, f.control.start));
        edges.push((acc, finish, fin));
    }
    Edt0lSystem {
        alphabet,
        terminals: f.terminals.clone(),
        start_word: vec![seed],
        endos,
        control: ControlAutomaton {
            states: fin + 1,
            start: s0,
            accepts: [fin].into_iter().collect(),
            edges,
        },
    }
}

/// Image under a free-monoid homomorphism of the terminal alphabet, given
/// by letter name. Old terminals absent from the mapping are sent to
/// themselves and must then belong to the target alphabet.
pub fn hom_image(
    h: &Edt0lSystem,
    mapping: &BTreeMap<String, Vec<String>>,
    target_terminals: &[String],
) -> Result<Edt0lSystem, Edt0lError> {
    let mut alphabet = h.alphabet.clone();
    for name in target_terminals {
        if let Some(existing) = alphabet.lookup(name) {
            if !h.terminals.contains(&existing) {
                alphabet.rename_fresh(existing, &format!("{name}'"));
            }
        }
    }
    let mut terminals = BTreeSet::new();
    let mut target_ids: BTreeMap<&str, Letter> = BTreeMap::new();
    for name in target_terminals {
        let id = alphabet.intern(name);
        terminals.insert(id);
        target_ids.insert(name.as_str(), id);
    }
    let mut apply_map: BTreeMap<Letter, LetterWord> = BTreeMap::new();
    for &t in &h.terminals {
        let name = h.alphabet.name(t).to_string();
        let image_names = match mapping.get(&name) {
            Some(img) => img.clone(),
            None => vec![name.clone()],
        };
        let mut image = Vec::with_capacity(image_names.len());
        for im in &image_names {
            match target_ids.get(im.as_str()) {
                Some(&id) => image.push(id),
                None => return Err(Edt0lError::ImageOutsideTarget { name: im.clone() }),
            }
        }
        if image.len() == 1 && image[0] == t {
            continue;
        }
        apply_map.insert(t, image);
    }
    let mut endos = h.endos.clone();
    let apply = endos.len();
    endos.push(Endomorphism { map: apply_map });
    let fin = h.control.states;
    let mut edges = h.control.edges.clone();
    for &acc in &h.control.accepts {
        edges.push((acc, apply, fin));
    }
    Ok(Edt0lSystem {
        alphabet,
        terminals,
        start_word: h.start_word.clone(),
        endos,
        control: ControlAutomaton {
            states: fin + 1,
            start: h.control.start,
            accepts: [fin].into_iter().collect(),
            edges,
        },
    })
}

const MAX_SPLIT_CHOICES: usize = 20_000;

/// Intersection with the regular language of a [`WordAutomaton`].
///
/// Letters of the new system are state-bracketed triples `[p.c.q]` claiming
/// that the automaton reads the eventual expansion of `c` moving from `p`
/// to `q`. Each control step of the original system is serialized into a
/// gadget that splits every rewritten triple along all automaton state
/// chains (primed copies keep one pass from rewriting its own output), and
/// a final substitution keeps exactly the claims the automaton can make.
pub fn intersect_regular(
    m: &Edt0lSystem,
    automaton: &WordAutomaton,
) -> Result<Edt0lSystem, Edt0lError> {
    automaton.validate()?;

    // Single-letter start word, so the whole form is one claim initially.
    let mut wrapped = m.clone();
    let seed_letter = wrapped.alphabet.intern_fresh("@i");
    let seed_endo = wrapped.endos.len();
    wrapped
        .endos
        .push(Endomorphism::from_pairs([(seed_letter, wrapped.start_word.clone())]));
    let pre_state = wrapped.control.states;
    wrapped.control.states += 1;
    wrapped.control.edges.push((pre_state, seed_endo, wrapped.control.start));
    wrapped.control.start = pre_state;
    wrapped.start_word = vec![seed_letter];

    let q_count = automaton.states;
    let mut delta: HashSet<(usize, Letter, usize)> = HashSet::new();
    let mut successors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); q_count];
    for (f, name, t) in &automaton.edges {
        if let Some(letter) = wrapped.alphabet.lookup(name) {
            if wrapped.terminals.contains(&letter) {
                delta.insert((*f, letter, *t));
                successors[*f].insert(*t);
            }
        }
    }
    // Reflexive-transitive reachability, for pruning useless claims.
    let mut reach: Vec<BTreeSet<usize>> = (0..q_count).map(|p| [p].into()).collect();
    loop {
        let mut changed = false;
        for p in 0..q_count {
            let current: Vec<usize> = reach[p].iter().copied().collect();
            for s in current {
                for &t in &successors[s] {
                    if reach[p].insert(t) {
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    // A terminal letter no endomorphism ever rewrites can only discharge a
    // claim through an actual automaton transition, so its claims are pinned
    // to the transition relation instead of mere reachability.
    let inert: BTreeSet<Letter> = wrapped
        .terminals
        .iter()
        .copied()
        .filter(|t| wrapped.endos.iter().all(|e| !e.map.contains_key(t)))
        .collect();
    let link_allowed = |d: Letter, p: usize, q: usize| -> bool {
        if inert.contains(&d) {
            delta.contains(&(p, d, q))
        } else {
            reach[p].contains(&q)
        }
    };

    let mut alphabet = Alphabet::new();
    let mut terminals = BTreeSet::new();
    let mut terminal_of: BTreeMap<Letter, Letter> = BTreeMap::new();
    for &t in &wrapped.terminals {
        let id = alphabet.intern(wrapped.alphabet.name(t));
        terminals.insert(id);
        terminal_of.insert(t, id);
    }
    let junk = alphabet.intern_fresh("@z");

    let mut triples: HashMap<(usize, Letter, usize), Letter> = HashMap::new();
    let mut primed: HashMap<(usize, Letter, usize), Letter> = HashMap::new();
    let mut primed_pairs: Vec<(Letter, Letter)> = Vec::new(); // (primed, plain)
    let intern_triple =
        |alphabet: &mut Alphabet,
         triples: &mut HashMap<(usize, Letter, usize), Letter>,
         p: usize,
         c: Letter,
         q: usize|
         -> Letter {
            *triples.entry((p, c, q)).or_insert_with(|| {
                alphabet.intern_fresh(&format!("[{p}.{}.{q}]", wrapped.alphabet.name(c)))
            })
        };
    let intern_primed = |alphabet: &mut Alphabet,
                             triples: &mut HashMap<(usize, Letter, usize), Letter>,
                             primed: &mut HashMap<(usize, Letter, usize), Letter>,
                             primed_pairs: &mut Vec<(Letter, Letter)>,
                             p: usize,
                             c: Letter,
                             q: usize|
     -> Letter {
        if let Some(&id) = primed.get(&(p, c, q)) {
            return id;
        }
        let plain = *triples.entry((p, c, q)).or_insert_with(|| {
            alphabet.intern_fresh(&format!("[{p}.{}.{q}]", wrapped.alphabet.name(c)))
        });
        let id = alphabet.intern_fresh(&format!("[{p}.{}.{q}]*", wrapped.alphabet.name(c)));
        primed.insert((p, c, q), id);
        primed_pairs.push((id, plain));
        id
    };

    let mut endos: Vec<Endomorphism> = Vec::new();
    let unprime_id = 0usize; // reserved, filled in once all primes exist
    endos.push(Endomorphism::identity());

    // Gadget endo ids per original endo: the deterministic pass plus one
    // stage of choice endos per multi-letter-image claim.
    struct Gadget {
        det: Option<usize>,
        stages: Vec<Vec<usize>>,
    }
    let mut gadgets: Vec<Gadget> = Vec::new();
    for endo in &wrapped.endos {
        let mut det_map: BTreeMap<Letter, LetterWord> = BTreeMap::new();
        let mut stages: Vec<Vec<usize>> = Vec::new();
        for (&c, image) in &endo.map {
            match image.len() {
                0 => {
                    for p in 0..q_count {
                        for q in 0..q_count {
                            if !reach[p].contains(&q) {
                                continue;
                            }
                            let t = intern_triple(&mut alphabet, &mut triples, p, c, q);
                            det_map.insert(t, if p == q { Vec::new() } else { vec![junk] });
                        }
                    }
                }
                1 => {
                    for p in 0..q_count {
                        for q in 0..q_count {
                            if !reach[p].contains(&q) {
                                continue;
                            }
                            let t = intern_triple(&mut alphabet, &mut triples, p, c, q);
                            if !link_allowed(image[0], p, q) {
                                det_map.insert(t, vec![junk]);
                                continue;
                            }
                            let img = intern_primed(
                                &mut alphabet,
                                &mut triples,
                                &mut primed,
                                &mut primed_pairs,
                                p,
                                image[0],
                                q,
                            );
                            det_map.insert(t, vec![img]);
                        }
                    }
                }
                s => {
                    for p in 0..q_count {
                        for q in 0..q_count {
                            if !reach[p].contains(&q) {
                                continue;
                            }
                            let source = intern_triple(&mut alphabet, &mut triples, p, c, q);
                            // All state chains p -> p1 -> .. -> q whose links
                            // are admissible for the respective image letter.
                            let mut chains: Vec<Vec<usize>> = vec![vec![p]];
                            for step in 0..s - 1 {
                                let mut next = Vec::new();
                                for chain in &chains {
                                    let last = *chain.last().unwrap();
                                    for cand in 0..q_count {
                                        if !link_allowed(image[step], last, cand) {
                                            continue;
                                        }
                                        if !reach[cand].contains(&q) {
                                            continue;
                                        }
                                        let mut c2 = chain.clone();
                                        c2.push(cand);
                                        next.push(c2);
                                    }
                                }
                                chains = next;
                                if chains.len() > MAX_SPLIT_CHOICES {
                                    return Err(Edt0lError::TooManyHashSites {
                                        sites: chains.len(),
                                        limit: MAX_SPLIT_CHOICES,
                                    });
                                }
                            }
                            chains.retain(|chain| link_allowed(image[s - 1], chain[s - 1], q));
                            let mut stage = Vec::new();
                            for chain in &chains {
                                let mut word = Vec::with_capacity(s);
                                for (i, &d) in image.iter().enumerate() {
                                    let from = chain[i];
                                    let to = if i + 1 < s { chain[i + 1] } else { q };
                                    word.push(intern_primed(
                                        &mut alphabet,
                                        &mut triples,
                                        &mut primed,
                                        &mut primed_pairs,
                                        from,
                                        d,
                                        to,
                                    ));
                                }
                                stage.push(endos.len());
                                endos.push(Endomorphism::from_pairs([(source, word)]));
                            }
                            if stage.is_empty() {
                                // No admissible chain: occurrences of this
                                // claim can never complete.
                                stage.push(endos.len());
                                endos.push(Endomorphism::from_pairs([(source, vec![junk])]));
                            }
                            stages.push(stage);
                        }
                    }
                }
            }
        }
        let det = if det_map.is_empty() {
            None
        } else {
            endos.push(Endomorphism { map: det_map });
            Some(endos.len() - 1)
        };
        gadgets.push(Gadget { det, stages });
    }

    // Control: original states, then chain states per edge, then the final.
    let base_states = wrapped.control.states;
    let mut states = base_states;
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for &(from, endo, to) in &wrapped.control.edges {
        let gadget = &gadgets[endo];
        let mut cursor = from;
        if let Some(det) = gadget.det {
            let next = states;
            states += 1;
            edges.push((cursor, det, next));
            cursor = next;
        }
        for stage in &gadget.stages {
            let next = states;
            states += 1;
            for &choice in stage {
                edges.push((cursor, choice, next));
            }
            cursor = next;
        }
        edges.push((cursor, unprime_id, to));
    }

    // Final claim check: a terminal triple becomes its letter exactly when
    // the automaton has that transition; anything else is junk.
    let mut check_map: BTreeMap<Letter, LetterWord> = BTreeMap::new();
    let mut sorted_triples: Vec<((usize, Letter, usize), Letter)> =
        triples.iter().map(|(&k, &v)| (k, v)).collect();
    sorted_triples.sort_unstable();
    for ((p, c, q), id) in &sorted_triples {
        if let Some(&term) = terminal_of.get(c) {
            if delta.contains(&(*p, *c, *q)) {
                check_map.insert(*id, vec![term]);
            } else {
                check_map.insert(*id, vec![junk]);
            }
        }
    }
    let check_id = endos.len();
    endos.push(Endomorphism { map: check_map });
    let final_state = states;
    states += 1;
    for &acc in &wrapped.control.accepts {
        edges.push((acc, check_id, final_state));
    }

    endos[unprime_id] =
        Endomorphism { map: primed_pairs.iter().map(|&(pr, pl)| (pr, vec![pl])).collect() };

    let start_triple = intern_triple(
        &mut alphabet,
        &mut triples,
        automaton.start,
        seed_letter,
        automaton.accept,
    );

    Ok(Edt0lSystem {
        alphabet,
        terminals,
        start_word: vec![start_triple],
        endos,
        control: ControlAutomaton {
            states,
            start: wrapped.control.start,
            accepts: [final_state].into_iter().collect(),
            edges,
        },
    })
}

/// Split the single separator `#` of an `n`-block language into positional
/// separators: `w_1 # w_2 # .. # w_n` becomes `w_1 #1 w_2 #2 .. w_n #n`.
///
/// Every accepted word must contain exactly `n - 1` separators. Separator
/// occurrences are subscripted at their production sites (each site
/// independently, via parallel control edges), a fresh end marker supplies
/// the trailing `#n`, and an intersection with the regular filter
/// `v_1 #1 v_2 #2 .. v_n #n` keeps exactly the in-order assignment.
pub fn separate_hashes(h: &Edt0lSystem, n: usize) -> Result<Edt0lSystem, Edt0lError> {
    assert!(n >= 1, "block count must be positive");
    let hash_plain = match h.alphabet.lookup("#") {
        Some(l) if h.terminals.contains(&l) => l,
        _ => return Err(Edt0lError::MissingHashLetter { blocks: n }),
    };

    // Make sure no endomorphism rewrites the separator; afterwards the
    // barred copy is the letter whose occurrences become final separators.
    let rewrites_hash = h.endos.iter().any(|e| e.map.contains_key(&hash_plain));
    let (mut sys, carrier) = if rewrites_hash {
        let (fixed, bars) = fix_terminals_with_bars(h);
        let carrier = bars[&hash_plain];
        (fixed, carrier)
    } else {
        (h.clone(), hash_plain)
    };

    // Wrap so the start word (which may contain separators) is produced by
    // an ordinary control edge, and append the end marker.
    let seed_letter = sys.alphabet.intern_fresh("@e");
    let end_marker = sys.alphabet.intern_fresh("@n");
    let mut seeded = sys.start_word.clone();
    seeded.push(end_marker);
    let seed_endo = sys.endos.len();
    sys.endos.push(Endomorphism::from_pairs([(seed_letter, seeded)]));
    let pre_state = sys.control.states;
    sys.control.states += 1;
    sys.control.edges.push((pre_state, seed_endo, sys.control.start));
    sys.control.start = pre_state;
    sys.start_word = vec![seed_letter];

    // Subscripted separators are terminals; the bare separator no longer is.
    let subscripted: Vec<Letter> =
        (1..=n).map(|i| sys.alphabet.intern_fresh(&format!("#{i}"))).collect();
    sys.terminals.remove(&hash_plain);
    for &s in &subscripted {
        sys.terminals.insert(s);
    }

    // Split every carrier-producing endomorphism: one variant per
    // assignment of subscripts to its carrier occurrences.
    let mut variant_ids: Vec<Vec<usize>> = Vec::with_capacity(sys.endos.len());
    let mut new_endos: Vec<Endomorphism> = Vec::new();
    for endo in &sys.endos {
        let sites: usize =
            endo.map.values().map(|img| img.iter().filter(|&&c| c == carrier).count()).sum();
        if sites == 0 {
            variant_ids.push(vec![new_endos.len()]);
            new_endos.push(endo.clone());
            continue;
        }
        let choices = n.checked_pow(sites as u32).filter(|&c| c <= MAX_SPLIT_CHOICES).ok_or(
            Edt0lError::TooManyHashSites { sites, limit: MAX_SPLIT_CHOICES },
        )?;
        let mut ids = Vec::with_capacity(choices);
        let mut assignment = vec![0usize; sites];
        loop {
            let mut variant = Endomorphism::identity();
            let mut site = 0usize;
            for (&c, img) in &endo.map {
                let image = img
                    .iter()
                    .map(|&x| {
                        if x == carrier {
                            let s = subscripted[assignment[site]];
                            site += 1;
                            s
                        } else {
                            x
                        }
                    })
                    .collect();
                variant.map.insert(c, image);
            }
            ids.push(new_endos.len());
            new_endos.push(variant);
            // Odometer over subscript assignments.
            let mut pos = sites;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                assignment[pos] += 1;
                if assignment[pos] < n {
                    break;
                }
                assignment[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if pos == usize::MAX {
                break;
            }
        }
        variant_ids.push(ids);
    }
    let mut edges = Vec::new();
    for &(from, endo, to) in &sys.control.edges {
        for &variant in &variant_ids[endo] {
            edges.push((from, variant, to));
        }
    }
    sys.endos = new_endos;
    sys.control.edges = edges;

    // The end marker becomes the trailing separator at the very end.
    let finish = sys.endos.len();
    sys.endos.push(Endomorphism::from_pairs([(end_marker, vec![subscripted[n - 1]])]));
    let final_state = sys.control.states;
    sys.control.states += 1;
    let accepts = std::mem::take(&mut sys.control.accepts);
    for acc in accepts {
        sys.control.edges.push((acc, finish, final_state));
    }
    sys.control.accepts = [final_state].into_iter().collect();

    // Regular filter: blocks of non-separator terminals between separators
    // in increasing order, ending with #n.
    let plain_names: Vec<String> = sys
        .terminals
        .iter()
        .filter(|t| !subscripted.contains(t))
        .map(|&t| sys.alphabet.name(t).to_string())
        .collect();
    let mut filter_edges = Vec::new();
    for state in 0..n {
        for name in &plain_names {
            filter_edges.push((state, name.clone(), state));
        }
        filter_edges.push((state, format!("#{}", state + 1), state + 1));
    }
    let filter = WordAutomaton { states: n + 1, start: 0, accept: n, edges: filter_edges };
    intersect_regular(&sys, &filter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Fixed single-word language {w}.
    fn singleton(names: &[&str]) -> Edt0lSystem {
        let mut alphabet = Alphabet::new();
        let word: LetterWord = names.iter().map(|n| alphabet.intern(n)).collect();
        let terminals = word.iter().copied().collect();
        Edt0lSystem {
            alphabet,
            terminals,
            start_word: word,
            endos: vec![],
            control: ControlAutomaton {
                states: 1,
                start: 0,
                accepts: [0].into_iter().collect(),
                edges: vec![],
            },
        }
    }

    /// {a^m : 0 <= m} generated one letter per step.
    fn a_star_system() -> Edt0lSystem {
        let mut alphabet = Alphabet::new();
        let a = alphabet.intern("a");
        let bot = alphabet.intern("@1");
        let grow = Endomorphism::from_pairs([(bot, vec![a, bot])]);
        let erase = Endomorphism::from_pairs([(bot, vec![])]);
        Edt0lSystem {
            alphabet,
            terminals: [a].into_iter().collect(),
            start_word: vec![bot],
            endos: vec![grow, erase],
            control: ControlAutomaton {
                states: 2,
                start: 0,
                accepts: [1].into_iter().collect(),
                edges: vec![(0, 0, 0), (0, 1, 1)],
            },
        }
    }

    fn strings(sys: &Edt0lSystem, max_len: usize, max_steps: usize) -> BTreeSet<String> {
        let (words, saturated) = sys.enumerate_strings(max_len, max_steps);
        assert!(!saturated, "enumeration saturated");
        words
    }

    #[test]
    fn union_of_singletons() {
        let u = union(&singleton(&["a"]), &singleton(&["b"]));
        let words = strings(&u, 4, 6);
        assert_eq!(words, ["a".to_string(), "b".to_string()].into_iter().collect());
    }

    #[test]
    fn star_of_singleton() {
        let s = star(&singleton(&["a"]));
        let words = strings(&s, 3, 24);
        let expect: BTreeSet<String> =
            ["", "a", "aa", "aaa"].into_iter().map(str::to_string).collect();
        assert_eq!(words, expect);
    }

    #[test]
    fn concat_of_languages() {
        let c = concat(&singleton(&["a"]), &union(&singleton(&["b"]), &singleton(&["c"])));
        let words = strings(&c, 4, 20);
        let expect: BTreeSet<String> = ["ab", "ac"].into_iter().map(str::to_string).collect();
        assert_eq!(words, expect);
    }

    #[test]
    fn fix_terminals_preserves_language() {
        // The doubling system rewrites the terminal a directly.
        let mut alphabet = Alphabet::new();
        let a = alphabet.intern("a");
        let double = Endomorphism::from_pairs([(a, vec![a, a])]);
        let sys = Edt0lSystem {
            alphabet,
            terminals: [a].into_iter().collect(),
            start_word: vec![a],
            endos: vec![double],
            control: ControlAutomaton {
                states: 1,
                start: 0,
                accepts: [0].into_iter().collect(),
                edges: vec![(0, 0, 0)],
            },
        };
        let before = strings(&sys, 8, 10);
        let fixed = fix_terminals(&sys);
        for endo in &fixed.endos[..fixed.endos.len() - 1] {
            for &t in &fixed.terminals {
                assert!(!endo.map.contains_key(&t), "control endo rewrites a terminal");
            }
        }
        let after = strings(&fixed, 8, 10);
        assert_eq!(before, after);
        // Powers of two only.
        assert!(after.contains("aaaa"));
        assert!(!after.contains("aaa"));
    }

    #[test]
    fn fix_terminals_on_already_fixing_system() {
        let sys = a_star_system();
        assert_eq!(strings(&sys, 5, 10), strings(&fix_terminals(&sys), 5, 14));
    }

    #[test]
    fn hom_image_renames_and_duplicates() {
        let sys = singleton(&["a", "b"]);
        let mapping: BTreeMap<String, Vec<String>> = [
            ("a".to_string(), vec!["x".to_string(), "x".to_string()]),
            ("b".to_string(), vec![]),
        ]
        .into_iter()
        .collect();
        let h = hom_image(&sys, &mapping, &["x".to_string()]).unwrap();
        assert_eq!(strings(&h, 4, 6), ["xx".to_string()].into_iter().collect());
    }

    #[test]
    fn intersect_with_parity_automaton() {
        // {a^m} intersected with (aa)* leaves even powers.
        let sys = a_star_system();
        let automaton = WordAutomaton {
            states: 2,
            start: 0,
            accept: 0,
            edges: vec![(0, "a".to_string(), 1), (1, "a".to_string(), 0)],
        };
        let restricted = intersect_regular(&sys, &automaton).unwrap();
        let words = strings(&restricted, 6, 60);
        let expect: BTreeSet<String> =
            ["", "aa", "aaaa", "aaaaaa"].into_iter().map(str::to_string).collect();
        assert_eq!(words, expect);
    }

    #[test]
    fn intersect_respects_word_content() {
        // {ab, ba} via union of singletons, intersected with a(a|b)*.
        let sys = union(&singleton(&["a", "b"]), &singleton(&["b", "a"]));
        let automaton = WordAutomaton {
            states: 2,
            start: 0,
            accept: 1,
            edges: vec![
                (0, "a".to_string(), 1),
                (1, "a".to_string(), 1),
                (1, "b".to_string(), 1),
            ],
        };
        let restricted = intersect_regular(&sys, &automaton).unwrap();
        assert_eq!(strings(&restricted, 4, 40), ["ab".to_string()].into_iter().collect());
    }

    #[test]
    fn separate_single_word() {
        let sys = singleton(&["a", "#", "a"]);
        let separated = separate_hashes(&sys, 2).unwrap();
        let words = strings(&separated, 6, 60);
        assert_eq!(words, ["a#1a#2".to_string()].into_iter().collect());
    }

    #[test]
    fn separate_empty_language() {
        let mut sys = singleton(&["a", "#", "a"]);
        sys.control.accepts.clear();
        let separated = separate_hashes(&sys, 2).unwrap();
        assert!(separated.enumerate(8, 60).words.is_empty());
    }
}
