//! Failure paths of the external objective bridge inside a full run.

use std::time::Duration;

use peoa::harness::ExternalObjective;
use peoa::{Error, OptimizerConfig, SearchSpace};

fn space() -> SearchSpace {
    SearchSpace::uniform(2, -1.0, 1.0).unwrap()
}

#[test]
fn child_dying_mid_run_keeps_partial_record() {
    // Answers 50 evaluations, then exits.
    let cmd = "i=0; while read line; do i=$((i+1)); [ $i -gt 50 ] && exit 1; echo $i; done";
    let mut child = ExternalObjective::spawn(cmd).unwrap();
    let config = OptimizerConfig::for_dimension(2);
    let err = peoa::run(&mut child, &space(), &config).unwrap_err();
    assert!(matches!(err.root_cause(), Error::ChildExit(_)), "{err}");
    let partial = err.partial_record().expect("partial record");
    assert_eq!(partial.evals_used, 51);
    assert_eq!(partial.best_value, 1.0);
}

#[test]
fn nan_reply_is_non_finite_objective() {
    let mut child = ExternalObjective::spawn("while read line; do echo nan; done").unwrap();
    let err = peoa::run(&mut child, &space(), &OptimizerConfig::for_dimension(2)).unwrap_err();
    assert!(matches!(err.root_cause(), Error::NonFiniteObjective { .. }), "{err}");
}

#[test]
fn malformed_reply_is_protocol_error() {
    let mut child = ExternalObjective::spawn("while read line; do echo 1 2; done").unwrap();
    let err = peoa::run(&mut child, &space(), &OptimizerConfig::for_dimension(2)).unwrap_err();
    assert!(matches!(err.root_cause(), Error::Protocol(_)), "{err}");
}

#[test]
fn slow_child_times_out() {
    let mut child = ExternalObjective::spawn("read line; sleep 10")
        .unwrap()
        .with_timeout(Duration::from_millis(200));
    let err = peoa::run(&mut child, &space(), &OptimizerConfig::for_dimension(2)).unwrap_err();
    assert!(matches!(err.root_cause(), Error::Timeout(_)), "{err}");
    assert_eq!(err.partial_record().unwrap().evals_used, 1);
}

#[test]
fn echo_child_sums_coordinates() {
    let cmd = "while read line; do echo \"$line\" | awk '{ print $1 + $2 + $3 }'; done";
    let mut child = ExternalObjective::spawn(cmd).unwrap();
    assert_eq!(peoa::Objective::evaluate(&mut child, &[1.0, 2.0, 3.0]).unwrap(), 6.0);
}
