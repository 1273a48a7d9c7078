//! Graphviz export.

use std::fmt::Write as _;

use super::{BuchiAutomaton, Label};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

impl<L: Label, T: Clone> BuchiAutomaton<L, T> {
    /// DOT rendering: accepting states are double circles, the initial
    /// state has an incoming arrow from an invisible node.
    pub fn to_dot(&self, title: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", escape(title));
        out.push_str("  rankdir=LR;\n  __start [shape=point, style=invis];\n");
        for q in 0..self.num_states() {
            let shape = if self.is_accepting(q) { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  s{q} [label=\"{}\", shape={shape}];", escape(self.name(q)));
        }
        let _ = writeln!(out, "  __start -> s{};", self.initial());
        for t in self.transitions() {
            let _ = writeln!(
                out,
                "  s{} -> s{} [label=\"{}\"];",
                t.from,
                t.to,
                escape(&t.label.to_string())
            );
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::build;

    #[test]
    fn escapes_and_shapes() {
        let a = build(2, &[1], &[(0, 'a', 1)]);
        let dot = a.to_dot("x\"y");
        assert!(dot.starts_with("digraph \"x\\\"y\" {"));
        assert!(dot.contains("s1 [label=\"s1\", shape=doublecircle]"));
        assert!(dot.contains("s0 -> s1 [label=\"a\"]"));
    }

    #[test]
    fn empty_automaton_has_no_edges() {
        let a = build(1, &[], &[]);
        let dot = a.to_dot("empty");
        assert!(!dot.contains("s0 -> "));
    }
}
