//! Intersection and union.

use std::collections::HashMap;

use super::{BuchiAutomaton, Label, StateId};

impl<L: Label, T: Clone> BuchiAutomaton<L, T> {
    /// Language intersection. The result keeps the tags of `self`.
    ///
    /// States are triples `(p, q, track)`; the track flips from 0 to 1 after
    /// an accepting state of `self` and back after an accepting state of
    /// `other`, and the accepting states are the accepting `p` on track 0.
    pub fn intersect<U: Clone>(&self, other: &BuchiAutomaton<L, U>) -> BuchiAutomaton<L, T> {
        let mut by_label: Vec<HashMap<&L, Vec<StateId>>> = vec![HashMap::new(); other.num_states()];
        for t in other.transitions() {
            by_label[t.from].entry(&t.label).or_default().push(t.to);
        }
        let name = |p: StateId, q: StateId, track: u8| {
            format!("({}, {}, {})", self.name(p), other.name(q), track)
        };
        // when one side accepts everywhere the other side's acceptance
        // decides and one track suffices
        let self_all = (0..self.num_states()).all(|p| self.is_accepting(p));
        let other_all = (0..other.num_states()).all(|q| other.is_accepting(q));
        let accepting = |p: StateId, q: StateId, track: u8| {
            if self_all {
                other.is_accepting(q)
            } else if other_all {
                self.is_accepting(p)
            } else {
                track == 0 && self.is_accepting(p)
            }
        };
        let start = (self.initial(), other.initial(), 0u8);
        let mut out = BuchiAutomaton::new(
            name(start.0, start.1, 0),
            accepting(start.0, start.1, 0),
        );
        let mut ids = HashMap::from([(start, 0usize)]);
        let mut work = vec![start];
        while let Some((p, q, track)) = work.pop() {
            let src = ids[&(p, q, track)];
            let next_track = match track {
                _ if self_all || other_all => 0,
                0 if self.is_accepting(p) => 1,
                1 if other.is_accepting(q) => 0,
                t => t,
            };
            for &i in self.outgoing(p) {
                let t = self.transition(i);
                let Some(targets) = by_label[q].get(&t.label) else {
                    continue;
                };
                for &q2 in targets {
                    let key = (t.to, q2, next_track);
                    let dst = *ids.entry(key).or_insert_with(|| {
                        work.push(key);
                        out.add_state(name(t.to, q2, next_track), accepting(t.to, q2, next_track))
                    });
                    out.add_transition(src, t.label.clone(), dst, t.tag.clone());
                }
            }
        }
        out
    }

    /// Language union over disjoint copies and a fresh initial state.
    pub fn union(&self, other: &BuchiAutomaton<L, T>) -> BuchiAutomaton<L, T> {
        let mut out = BuchiAutomaton::new("init", false);
        let copy = |a: &BuchiAutomaton<L, T>, prefix: &str, out: &mut BuchiAutomaton<L, T>| {
            let base = out.num_states();
            for q in 0..a.num_states() {
                out.add_state(format!("{prefix}{}", a.name(q)), a.is_accepting(q));
            }
            for t in a.transitions() {
                out.add_transition(base + t.from, t.label.clone(), base + t.to, t.tag.clone());
                if t.from == a.initial() {
                    out.add_transition(0, t.label.clone(), base + t.to, t.tag.clone());
                }
            }
        };
        copy(self, "L.", &mut out);
        copy(other, "R.", &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::build;

    #[test]
    fn intersection_of_infinitely_often() {
        // inf many a  ∩  inf many b
        let a = build(2, &[1], &[(0, 'b', 0), (0, 'a', 1), (1, 'a', 1), (1, 'b', 0)]);
        let b = build(2, &[1], &[(0, 'a', 0), (0, 'b', 1), (1, 'b', 1), (1, 'a', 0)]);
        let c = a.intersect(&b);
        assert!(c.accepts_lasso(&[], &['a', 'b']));
        assert!(!c.accepts_lasso(&['b'], &['a']));
        assert!(!c.accepts_lasso(&[], &['b']));
    }

    #[test]
    fn union_accepts_either() {
        let a = build(1, &[0], &[(0, 'a', 0)]);
        let b = build(1, &[0], &[(0, 'b', 0)]);
        let u = a.union(&b);
        assert!(u.accepts_lasso(&[], &['a']));
        assert!(u.accepts_lasso(&[], &['b']));
        assert!(!u.accepts_lasso(&['a'], &['b']));
    }
}
