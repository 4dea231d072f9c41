//! Drives a session in-process the way a person would: answer from a hidden
//! story, contradict it once, then correct the answer when asked again.

use qcn_core::algebra::interval_algebra;
use qcn_elicit::{AnswerRequest, CreateSession, Session, SessionState};

fn main() {
    let ia = interval_algebra();
    let names = ["breakfast", "commute", "meeting"];
    // hidden story: each event before the next
    let truth = |kind: &str, rel: Option<&str>| kind == "relation" && rel == Some("P");
    let mut s = Session::create("demo".into(), &CreateSession::new(&names)).expect("valid");
    let mut lied = false;
    loop {
        let view = s.view();
        let Some(q) = view.query else { break };
        let mut yes = truth(&q.kind, q.relation.as_deref());
        // one wrong "no" on the first true relation asked
        if yes && !lied && !q.reask {
            yes = false;
            lied = true;
        }
        println!(
            "{}{} -> {}",
            if q.reask { "[asked again] " } else { "" },
            q.text,
            if yes { "yes" } else { "no" }
        );
        s.answer(AnswerRequest {
            query_id: q.query_id,
            yes,
        })
        .expect("outstanding query");
    }
    assert_eq!(s.state(), SessionState::Converged);
    let learned = s.learned();
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        println!("{} {} {}", names[i], ia.format(learned.get(i, j)), names[j]);
    }
}
