//! Shared inputs for the analysis benchmarks.

use std::fmt::Write as _;

pub const DIFF: &str = "
diff(X, L, K) :- member(X, L), \\+ member(X, K).
diff(X, L, K) :- member(X, K), \\+ member(X, L).
member(X, [X|L]).
member(X, [H|L]) :- member(X, L).
:- query(diff(X, Y, Z), [Y, Z]).
";

pub const DIFF_SAMPLES: &str = "sample(5, Y = [2,1], Z = [3,1]).";

/// A chain of `n` list predicates, each calling the next and the negation
/// of a membership test, with one query on the first.
pub fn chain(n: usize) -> String {
    let mut s = String::from("mem(X, [X|_]).\nmem(X, [_|T]) :- mem(X, T).\n");
    for k in 0..n {
        writeln!(s, "p{k}([], []).").unwrap();
        if k + 1 < n {
            writeln!(s, "p{k}([H|T], [H|R]) :- p{}(T, R), \\+ mem(H, R).", k + 1).unwrap();
        } else {
            writeln!(s, "p{k}([H|T], [H|R]) :- p{k}(T, R), \\+ mem(H, R).").unwrap();
        }
    }
    s.push_str(":- query(p0(A, B), [A]).\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use nlpabs_core::{parse_program, ProgramGraph};

    #[test]
    fn inputs_parse() {
        assert_eq!(ProgramGraph::build(&parse_program(DIFF).unwrap()).edges().len(), 23);
        let p = parse_program(&chain(5)).unwrap();
        assert_eq!(p.clauses().len(), 12);
    }
}
