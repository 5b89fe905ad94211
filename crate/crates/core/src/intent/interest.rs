use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{Inference, IntentError};

/// Group name given to inferences without a tag.
pub const UNTAGGED_GROUP: &str = "ALL";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeInterest {
    pub group: String,
    pub n: usize,
    /// Percent of contents inferred TEXT.
    pub ri_text: f64,
    pub ri_image: f64,
}

fn group_of(i: &Inference) -> &str {
    i.group.as_deref().unwrap_or(UNTAGGED_GROUP)
}

fn summarize(group: &str, text: usize, n: usize) -> RelativeInterest {
    let ri_text = 100.0 * text as f64 / n as f64;
    RelativeInterest { group: group.to_string(), n, ri_text, ri_image: 100.0 * (n - text) as f64 / n as f64 }
}

/// Share of TEXT and IMAGE inferences among those tagged `group`.
pub fn relative_interest(inferences: &[Inference], group: &str) -> Result<RelativeInterest, IntentError> {
    let members: Vec<&Inference> = inferences.iter().filter(|i| group_of(i) == group).collect();
    if members.is_empty() {
        return Err(IntentError::EmptyGroup(group.to_string()));
    }
    let text = members.iter().filter(|i| i.label.is_positive()).count();
    Ok(summarize(group, text, members.len()))
}

/// One row per group, sorted by group name.
pub fn relative_interest_table(inferences: &[Inference]) -> Vec<RelativeInterest> {
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for i in inferences {
        let e = counts.entry(group_of(i)).or_default();
        e.1 += 1;
        if i.label.is_positive() {
            e.0 += 1;
        }
    }
    counts.into_iter().map(|(g, (t, n))| summarize(g, t, n)).collect()
}

/// CSV `group,n,ri_text,ri_image` with percentages to two decimals.
pub fn write_relative_interest<W: Write>(rows: &[RelativeInterest], out: W) -> Result<(), IntentError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["group", "n", "ri_text", "ri_image"])?;
    for r in rows {
        w.write_record([r.group.clone(), r.n.to_string(), format!("{:.2}", r.ri_text), format!("{:.2}", r.ri_image)])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Label;
    use proptest::prelude::*;

    fn batch(text: usize, image: usize, group: Option<&str>) -> Vec<Inference> {
        (0..text + image)
            .map(|i| Inference {
                source: format!("c{i}"),
                label: if i < text { Label::Text } else { Label::Image },
                score: 0.0,
                group: group.map(str::to_string),
            })
            .collect()
    }

    #[test]
    fn reported_splits() {
        let all_text = relative_interest(&batch(40, 0, Some("G")), "G").unwrap();
        assert_eq!((all_text.ri_text, all_text.ri_image), (100.0, 0.0));
        let g1 = relative_interest(&batch(9, 31, Some("G1")), "G1").unwrap();
        assert_eq!((g1.n, g1.ri_image), (40, 77.5));
        let g2 = relative_interest(&batch(17, 23, Some("G2")), "G2").unwrap();
        assert_eq!((g2.ri_text, g2.ri_image), (42.5, 57.5));
    }

    #[test]
    fn table_and_csv() {
        let mut infs = batch(9, 31, Some("G1"));
        infs.extend(batch(1, 1, None));
        let t = relative_interest_table(&infs);
        assert_eq!(t.iter().map(|r| r.group.as_str()).collect::<Vec<_>>(), vec!["ALL", "G1"]);
        let mut buf = Vec::new();
        write_relative_interest(&t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "group,n,ri_text,ri_image\nALL,2,50.00,50.00\nG1,40,22.50,77.50\n");
    }

    #[test]
    fn empty_group() {
        assert!(matches!(relative_interest(&batch(3, 3, Some("G1")), "G2"), Err(IntentError::EmptyGroup(_))));
        assert!(relative_interest(&batch(1, 0, None), UNTAGGED_GROUP).is_ok());
    }

    proptest! {
        #[test]
        fn sums_to_one_hundred_and_ignores_order(bits in prop::collection::vec(any::<bool>(), 1..200), seed: u64) {
            let mut infs: Vec<Inference> = bits.iter().enumerate().map(|(i, &b)| Inference {
                source: i.to_string(),
                label: if b { Label::Text } else { Label::Image },
                score: 0.0,
                group: None,
            }).collect();
            let a = relative_interest(&infs, UNTAGGED_GROUP).unwrap();
            prop_assert!((a.ri_text + a.ri_image - 100.0).abs() < 1e-9);
            prop_assert!((0.0..=100.0).contains(&a.ri_text));
            crate::rng::SeedStream::new(seed, crate::rng::domain::TEST_DATA, 0).shuffle(&mut infs);
            prop_assert_eq!(relative_interest(&infs, UNTAGGED_GROUP).unwrap(), a);
        }
    }
}
