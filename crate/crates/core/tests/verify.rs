use num_traits::{One, Signed, Zero};

use modbound::certificate::{parse_field, CertificateDocument, Kind, Status};
use modbound::certify::{certify, CertifyOptions, Method};
use modbound::corpus;
use modbound::rational::format_rational;
use modbound::verify::{verify_against, verify_document, Condition};
use modbound::Rational;

fn certificate(entry: &corpus::CorpusEntry, method: Method) -> CertificateDocument {
    let opts = CertifyOptions {
        method,
        max_subnet_size: 4,
        ..CertifyOptions::default()
    };
    certify(&entry.network().unwrap(), &opts).unwrap().document
}

fn value(text: &str) -> Rational {
    parse_field(text, "test").unwrap()
}

fn expect(doc: &CertificateDocument, condition: Condition) {
    match verify_document(doc) {
        Ok(_) => panic!("mutant accepted, expected {condition}"),
        Err(v) => assert_eq!(v.condition, condition, "{v}"),
    }
}

fn first(doc: &CertificateDocument, kind: Kind) -> usize {
    doc.components
        .iter()
        .position(|c| c.kind == kind && !value(&c.lambda).is_zero())
        .expect("component of that kind")
}

#[test]
fn emitted_certificates_verify() {
    for entry in corpus::BUNDLED {
        for method in [Method::Chains, Method::Both] {
            if method == Method::Both && entry.name == corpus::LES_MISERABLES.name {
                continue;
            }
            let doc = certificate(entry, method);
            let v = verify_document(&doc).unwrap();
            assert_eq!(v.bound, doc.bound_value().unwrap());
            verify_against(&doc, &entry.network().unwrap()).unwrap();
        }
    }
}

#[test]
fn other_network_is_rejected() {
    let doc = certificate(&corpus::FLORENTINE, Method::Chains);
    let err = verify_against(&doc, &corpus::KARATE.network().unwrap()).unwrap_err();
    assert_eq!(err.condition, Condition::Document);
}

#[test]
fn weight_mutants_break_permissibility() {
    let base = certificate(&corpus::KARATE, Method::Both);
    for kind in [Kind::Chain, Kind::Subnetwork] {
        let j = first(&base, kind);
        let rec = &base.components[j];
        let (_, _, load) = rec
            .scores
            .iter()
            .find(|(_, _, v)| !value(v).is_zero())
            .unwrap();
        let one_pair = value(load).abs();

        let mut doc = base.clone();
        doc.components[j].lambda =
            format_rational(&(Rational::from_integer(1000.into()) / one_pair));
        expect(&doc, Condition::Permissibility);

        let mut doc = base.clone();
        doc.components[j].lambda = "-1/2".into();
        expect(&doc, Condition::Permissibility);

        let mut doc = base.clone();
        let entry = doc.components[j]
            .scores
            .iter_mut()
            .find(|(_, _, v)| !value(v).is_zero())
            .unwrap();
        entry.2 = format_rational(&-value(&entry.2));
        expect(&doc, Condition::Permissibility);
    }
}

#[test]
fn penalty_mutants_break_penalty() {
    let base = certificate(&corpus::KARATE, Method::Both);
    for kind in [Kind::Chain, Kind::Subnetwork] {
        let j = first(&base, kind);
        let mut doc = base.clone();
        let positive: Rational = doc.components[j]
            .scores
            .iter()
            .map(|(_, _, v)| value(v))
            .filter(|v| v.is_positive())
            .sum();
        doc.components[j].penalty = format_rational(&(positive + Rational::one()));
        expect(&doc, Condition::Penalty);

        let mut doc = base.clone();
        doc.components[j].penalty = "-1/3".into();
        expect(&doc, Condition::Penalty);
    }
}

#[test]
fn arithmetic_mutants_break_bound() {
    let base = certificate(&corpus::FLORENTINE, Method::Both);
    assert_eq!(base.status, Status::OptimalProved);
    let tiny = Rational::new(1.into(), 1_000_000.into());
    let bump = |text: &str| format_rational(&(value(text) + &tiny));

    let mut doc = base.clone();
    doc.bound = bump(&doc.bound);
    expect(&doc, Condition::Bound);

    let mut doc = base.clone();
    doc.trivial_bound = bump(&doc.trivial_bound);
    expect(&doc, Condition::Bound);

    let mut doc = base.clone();
    doc.achieved.modularity = bump(&doc.achieved.modularity);
    expect(&doc, Condition::Bound);

    let mut doc = base.clone();
    doc.status = Status::Gap;
    expect(&doc, Condition::Bound);

    let mut doc = base.clone();
    doc.gap = bump(&doc.gap);
    expect(&doc, Condition::Bound);

    let mut doc = base.clone();
    let moved = doc.achieved.communities[0].pop().unwrap();
    doc.achieved.communities[1].push(moved);
    expect(&doc, Condition::Bound);
}

#[test]
fn network_mutants_break_document() {
    let base = certificate(&corpus::KARATE, Method::Chains);
    let mut doc = base.clone();
    doc.network.edges[0].2 = "2/1".into();
    expect(&doc, Condition::Document);

    let mut doc = base.clone();
    doc.network.edges.pop();
    expect(&doc, Condition::Document);

    let mut doc = base.clone();
    doc.components[0].nodes[0] = "nobody".into();
    expect(&doc, Condition::Document);
}
