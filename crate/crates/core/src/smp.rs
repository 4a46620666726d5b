//! Man-proposing stable marriage as a lattice-linear predicate.
//!
//! `s[m]` is a 1-based position in man `m`'s preference list. A man is
//! forbidden when the woman he proposes to receives a proposal from a man she
//! ranks better; his move advances to the next position on his list.

use thiserror::Error;

use crate::framework::{Algorithm, Domain, Exhausted, GlobalState, LatticeKind, LocalState, VarRange};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrefsError {
    #[error("instance must have at least one man and one woman")]
    Empty,
    #[error("{side} {who}: preference list is not a permutation of 1..={n}")]
    NotPermutation { side: &'static str, who: usize, n: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Complete, strict preference lists for `n` men and `n` women; indices are
/// 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmpInstance {
    n: usize,
    /// `men_prefs[m-1][p-1]` is the woman at position `p` of man `m`'s list.
    men_prefs: Vec<Vec<usize>>,
    /// `women_ranks[w-1][m-1]` is woman `w`'s rank of man `m`, 1 best.
    women_ranks: Vec<Vec<usize>>,
}

fn check_permutation(list: &[usize], n: usize, side: &'static str, who: usize) -> Result<(), PrefsError> {
    let mut seen = vec![false; n];
    if list.len() != n {
        return Err(PrefsError::NotPermutation { side, who, n });
    }
    for &x in list {
        if x == 0 || x > n || seen[x - 1] {
            return Err(PrefsError::NotPermutation { side, who, n });
        }
        seen[x - 1] = true;
    }
    Ok(())
}

impl SmpInstance {
    /// `women_prefs[w-1]` lists men best first.
    pub fn new(men_prefs: Vec<Vec<usize>>, women_prefs: Vec<Vec<usize>>) -> Result<Self, PrefsError> {
        let n = men_prefs.len();
        if n == 0 {
            return Err(PrefsError::Empty);
        }
        if women_prefs.len() != n {
            return Err(PrefsError::NotPermutation {
                side: "woman",
                who: women_prefs.len().min(n) + 1,
                n,
            });
        }
        for (m, list) in men_prefs.iter().enumerate() {
            check_permutation(list, n, "man", m + 1)?;
        }
        let mut women_ranks = vec![vec![0; n]; n];
        for (w, list) in women_prefs.iter().enumerate() {
            check_permutation(list, n, "woman", w + 1)?;
            for (pos, &m) in list.iter().enumerate() {
                women_ranks[w][m - 1] = pos + 1;
            }
        }
        Ok(SmpInstance {
            n,
            men_prefs,
            women_ranks,
        })
    }

    /// Three men A, J, T (1, 2, 3) and women indexed K, Z, M (1, 2, 3) with
    /// A = (Z,K,M), J = (Z,K,M), T = (K,M,Z); Z = (A,J,T), K = (J,T,A),
    /// M = (T,J,A).
    pub fn three_by_three() -> Self {
        let (k, z, m) = (1, 2, 3);
        let (a, j, t) = (1, 2, 3);
        SmpInstance::new(
            vec![vec![z, k, m], vec![z, k, m], vec![k, m, z]],
            vec![vec![j, t, a], vec![a, j, t], vec![t, j, a]],
        )
        .expect("valid instance")
    }

    /// Uniformly random complete preference lists.
    pub fn random<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        use rand::seq::SliceRandom;
        let mut perm = || {
            let mut p: Vec<usize> = (1..=n).collect();
            p.shuffle(rng);
            p
        };
        let men = (0..n).map(|_| perm()).collect();
        let women = (0..n).map(|_| perm()).collect();
        SmpInstance::new(men, women).expect("permutations")
    }

    /// Line 1 is `n`; the next `n` lines are the men's lists and the
    /// following `n` lines the women's lists, best first. `#` lines are
    /// comments.
    pub fn parse(text: &str) -> Result<Self, PrefsError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (first, header) = lines.next().ok_or(PrefsError::Parse {
            line: 1,
            message: "missing size line".into(),
        })?;
        let n: usize = header.parse().map_err(|_| PrefsError::Parse {
            line: first,
            message: format!("invalid size {header:?}"),
        })?;
        if n == 0 {
            return Err(PrefsError::Parse {
                line: first,
                message: PrefsError::Empty.to_string(),
            });
        }
        let mut lists = Vec::with_capacity(2 * n);
        let mut last = first;
        for k in 0..2 * n {
            let (line, body) = lines.next().ok_or_else(|| PrefsError::Parse {
                line: last + 1,
                message: format!("expected {} preference lines, found {k}", 2 * n),
            })?;
            let list = body
                .split_whitespace()
                .map(|f| f.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| PrefsError::Parse {
                    line,
                    message: format!("invalid preference list {body:?}"),
                })?;
            let (side, who) = if k < n { ("man", k + 1) } else { ("woman", k - n + 1) };
            check_permutation(&list, n, side, who).map_err(|e| PrefsError::Parse {
                line,
                message: e.to_string(),
            })?;
            lists.push(list);
            last = line;
        }
        if let Some((line, _)) = lines.next() {
            return Err(PrefsError::Parse {
                line,
                message: "unexpected data after preference lists".into(),
            });
        }
        let women = lists.split_off(n);
        SmpInstance::new(lists, women)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn man_pref(&self, man: usize, position: usize) -> usize {
        self.men_prefs[man - 1][position - 1]
    }

    /// Woman `w`'s rank of man `m`, 1 best.
    pub fn rank(&self, woman: usize, man: usize) -> usize {
        self.women_ranks[woman - 1][man - 1]
    }

    pub fn proposal_target(&self, s: &GlobalState, man: NodeId) -> usize {
        self.man_pref(man.0, s.value(man) as usize)
    }

    /// Someone else proposes to the same woman and she ranks him better.
    pub fn forbidden_smp(&self, s: &GlobalState, man: NodeId) -> bool {
        let w = self.proposal_target(s, man);
        let mine = self.rank(w, man.0);
        (1..=self.n)
            .filter(|&other| other != man.0)
            .any(|other| self.proposal_target(s, NodeId(other)) == w && self.rank(w, other) < mine)
    }

    /// Proposal targets are pairwise distinct.
    pub fn satisfies_psmp(&self, s: &GlobalState) -> bool {
        let mut taken = vec![false; self.n];
        for man in 1..=self.n {
            let w = self.proposal_target(s, NodeId(man));
            if taken[w - 1] {
                return false;
            }
            taken[w - 1] = true;
        }
        true
    }

    /// Man-proposing Gale–Shapley; returns each man's partner.
    pub fn gale_shapley(&self) -> Vec<usize> {
        let n = self.n;
        let mut next = vec![0usize; n];
        let mut husband: Vec<Option<usize>> = vec![None; n];
        let mut free: Vec<usize> = (1..=n).rev().collect();
        while let Some(m) = free.pop() {
            let w = self.men_prefs[m - 1][next[m - 1]];
            next[m - 1] += 1;
            match husband[w - 1] {
                None => husband[w - 1] = Some(m),
                Some(h) if self.rank(w, m) < self.rank(w, h) => {
                    husband[w - 1] = Some(m);
                    free.push(h);
                }
                Some(_) => free.push(m),
            }
        }
        let mut wife = vec![0; n];
        for (w, h) in husband.iter().enumerate() {
            wife[h.expect("complete lists always match") - 1] = w + 1;
        }
        wife
    }

    /// No man and woman both prefer each other to their partners.
    pub fn is_stable(&self, wife: &[usize]) -> bool {
        let mut husband = vec![0; self.n];
        for (m, &w) in wife.iter().enumerate() {
            husband[w - 1] = m + 1;
        }
        for m in 1..=self.n {
            for &w in &self.men_prefs[m - 1] {
                if w == wife[m - 1] {
                    break;
                }
                if self.rank(w, m) < self.rank(w, husband[w - 1]) {
                    return false;
                }
            }
        }
        true
    }

    /// The matching a state encodes, if its targets are distinct.
    pub fn matching(&self, s: &GlobalState) -> Option<Vec<usize>> {
        self.satisfies_psmp(s)
            .then(|| (1..=self.n).map(|m| self.proposal_target(s, NodeId(m))).collect())
    }
}

/// Advances man `m` to his next choice.
pub fn advance(s: &GlobalState, man: NodeId, n: usize) -> Result<GlobalState, Exhausted> {
    let pos = s.value(man);
    if pos as usize >= n {
        Err(Exhausted { node: man })
    } else {
        Ok(s.with_local(man, &[pos + 1]))
    }
}

/// The stable-marriage rule set. Men read every other man, so the
/// communication graph is complete.
#[derive(Clone, Debug)]
pub struct Smp {
    instance: SmpInstance,
    graph: Graph,
    domain: Domain,
}

impl Smp {
    pub fn new(instance: SmpInstance) -> Self {
        let n = instance.size();
        Smp {
            graph: Graph::complete(n).expect("n >= 1"),
            domain: Domain::uniform(n, VarRange::new(1, n as u32)),
            instance,
        }
    }

    pub fn instance(&self) -> &SmpInstance {
        &self.instance
    }
}

impl Algorithm for Smp {
    fn name(&self) -> &'static str {
        "smp"
    }

    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn read_radius(&self) -> usize {
        1
    }

    fn is_forbidden(&self, state: &GlobalState, node: NodeId) -> bool {
        self.instance.forbidden_smp(state, node)
    }

    fn next_local(&self, state: &GlobalState, node: NodeId) -> Result<LocalState, Exhausted> {
        advance(state, node, self.instance.size()).map(|next| next.local_state(node))
    }

    fn is_optimal(&self, state: &GlobalState) -> bool {
        self.instance.satisfies_psmp(state)
    }

    /// Remaining list positions summed over men; every advance lowers it by 1.
    fn rank(&self, state: &GlobalState) -> u64 {
        let n = self.instance.size() as u64;
        state.values().iter().map(|&v| n - v as u64).sum()
    }

    fn lattice_kind(&self) -> LatticeKind {
        LatticeKind::Product
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::forbidden_nodes;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    const A: NodeId = NodeId(1);
    const J: NodeId = NodeId(2);
    const T: NodeId = NodeId(3);
    const K: usize = 1;
    const Z: usize = 2;
    const M: usize = 3;

    fn st(v: &[u32]) -> GlobalState {
        GlobalState::from_values(v.to_vec())
    }

    #[test]
    fn proposal_target_examples() {
        let inst = SmpInstance::three_by_three();
        assert_eq!(inst.proposal_target(&st(&[1, 1, 1]), A), Z);
        assert_eq!(inst.proposal_target(&st(&[1, 2, 2]), T), M);
        for m in 1..=3 {
            assert_eq!(inst.proposal_target(&st(&[1, 1, 1]), NodeId(m)), inst.man_pref(m, 1));
        }
        assert_eq!(inst.proposal_target(&st(&[1, 1, 1]), T), K);
    }

    #[test]
    fn forbidden_examples() {
        let alg = Smp::new(SmpInstance::three_by_three());
        let set = |v: &[NodeId]| v.iter().copied().collect::<BTreeSet<_>>();
        assert_eq!(forbidden_nodes(&alg, &st(&[1, 1, 1])), set(&[J]));
        assert_eq!(forbidden_nodes(&alg, &st(&[1, 2, 1])), set(&[T]));
        assert_eq!(forbidden_nodes(&alg, &st(&[1, 2, 2])), set(&[]));
        // A and T both propose to Z at (1,2,3); Z prefers A.
        assert_eq!(forbidden_nodes(&alg, &st(&[1, 2, 3])), set(&[T]));
    }

    #[test]
    fn advance_examples() {
        assert_eq!(advance(&st(&[1, 1, 1]), J, 3).unwrap(), st(&[1, 2, 1]));
        assert_eq!(advance(&st(&[3, 1, 2]), A, 3), Err(Exhausted { node: A }));
        let next = advance(&st(&[2, 1, 3]), J, 3).unwrap();
        assert_eq!(next.values(), &[2, 2, 3]);
    }

    #[test]
    fn psmp_examples() {
        let inst = SmpInstance::three_by_three();
        assert!(inst.satisfies_psmp(&st(&[1, 2, 2])));
        assert!(!inst.satisfies_psmp(&st(&[1, 1, 1])));
        let single = SmpInstance::new(vec![vec![1]], vec![vec![1]]).unwrap();
        assert!(single.satisfies_psmp(&st(&[1])));
    }

    #[test]
    fn gale_shapley_matches_worked_optimum() {
        let inst = SmpInstance::three_by_three();
        // (1,2,2): A-Z, J-K, T-M.
        assert_eq!(inst.gale_shapley(), vec![Z, K, M]);
        assert_eq!(inst.matching(&st(&[1, 2, 2])), Some(vec![Z, K, M]));
        assert!(inst.is_stable(&[Z, K, M]));
        assert!(!inst.is_stable(&[K, Z, M]));
    }

    #[test]
    fn parse_instance_file() {
        let text = "# men A J T, women K Z M\n3\n2 1 3\n2 1 3\n1 3 2\n2 3 1\n1 2 3\n3 2 1\n";
        assert_eq!(SmpInstance::parse(text).unwrap(), SmpInstance::three_by_three());
    }

    #[test]
    fn parse_errors() {
        let err = SmpInstance::parse("2\n1 2\n1 1\n1 2\n2 1\n").unwrap_err();
        assert!(matches!(err, PrefsError::Parse { line: 3, .. }), "{err:?}");
        let err = SmpInstance::parse("2\n1 2\n2 1\n1 2\n").unwrap_err();
        assert!(matches!(err, PrefsError::Parse { line: 5, .. }), "{err:?}");
        let err = SmpInstance::parse("x\n").unwrap_err();
        assert!(matches!(err, PrefsError::Parse { line: 1, .. }), "{err:?}");
        let err = SmpInstance::parse("1\n1\n1\n1\n").unwrap_err();
        assert!(matches!(err, PrefsError::Parse { line: 4, .. }), "{err:?}");
    }

    proptest! {
        #[test]
        fn gale_shapley_is_stable(n in 1usize..7, seed in any::<u64>()) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let inst = SmpInstance::random(n, &mut rng);
            let wife = inst.gale_shapley();
            prop_assert!(inst.is_stable(&wife));
        }
    }
}
