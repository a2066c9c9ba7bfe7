//! Construct and classify switching signals.
//!
//! Constructors guarantee structural properties (periodic signals are
//! recurrent; growing constant runs make a signal nonchaotic; Bernoulli
//! and Markov sampling model the ergodic case), while classification of a
//! finite prefix only ever reports finite evidence: genericity so far,
//! constant prefixes, detected periods, matches against exceptional words.
//!
//! Run with: cargo run -p swistab --example switching_signals

use swistab::signals::{classify_prefix, make_constant_run, make_periodic, Filler, RunSchedule};
use swistab::subspace::exception_words_for_dim;
use swistab::words::Word;
use swistab::SwitchingSignal;

fn show(name: &str, sig: &SwitchingSignal, n: usize) {
    let prefix = sig.prefix(n.min(24));
    let cls = classify_prefix(sig, n, &exception_words_for_dim(2));
    let rendered: Vec<String> = prefix.iter().map(|l| l.to_string()).collect();
    println!("{name}: {} ...", rendered.join(""));
    println!(
        "  generic so far: {}, constant: {}, period: {:?}, exception: {:?}",
        cls.generic_so_far,
        cls.constant_prefix,
        cls.detected_period,
        cls.matches_exception.map(|w| w.to_string()),
    );
}

fn main() {
    let alternating = make_periodic(Word::new(vec![1, 2]).unwrap());
    show("alternating", &alternating, 600);

    let coin = SwitchingSignal::bernoulli(vec![0.5, 0.5], 11).unwrap();
    show("fair coin  ", &coin, 600);

    let chain =
        SwitchingSignal::markov(vec![vec![0.95, 0.05], vec![0.05, 0.95]], vec![0.5, 0.5], 11)
            .unwrap();
    show("sticky markov", &chain, 600);

    let runs = make_constant_run(
        1,
        RunSchedule::new(1, 1).unwrap(),
        Filler::Word(Word::new(vec![2]).unwrap()),
        0,
    )
    .unwrap();
    show("growing runs", &runs, 600);
}
