use std::collections::BTreeSet;

use crate::model::{ArgName, ArgToken, Argument, LogicalForm, LogicalFormStep, Operator};

/// The three collapse rules, named `referrer-argument -> referred`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MergeRule {
    ProjectSubSelect,
    FilterSubSelect,
    FilterSubFilter,
}

impl MergeRule {
    pub fn name(self) -> &'static str {
        match self {
            MergeRule::ProjectSubSelect => "project-sub -> select = project",
            MergeRule::FilterSubSelect => "filter-sub -> select = select",
            MergeRule::FilterSubFilter => "filter-sub -> filter = filter",
        }
    }
}

/// A merge that may be applied: step `src` absorbs the step `dst` it refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MergeSite {
    pub src: usize,
    pub dst: usize,
    pub rule: MergeRule,
}

fn rule_for(src: &LogicalFormStep, dst: &LogicalFormStep, j: usize) -> Option<MergeRule> {
    match (src.operator, dst.operator) {
        (Operator::Project, Operator::Select) => Some(MergeRule::ProjectSubSelect),
        // Folding a select into a filter yields a select over all the words,
        // which only makes sense when the filter mentions no other step.
        (Operator::Filter, Operator::Select) if src.refs().iter().all(|&r| r == j) => {
            Some(MergeRule::FilterSubSelect)
        }
        (Operator::Filter, Operator::Filter) => Some(MergeRule::FilterSubFilter),
        _ => None,
    }
}

/// Every applicable merge, in order of the referring step and then of the
/// referred one. A step may be absorbed only when its single referrer
/// mentions it in the subject and nowhere else.
pub fn merge_sites(lf: &LogicalForm) -> Vec<MergeSite> {
    let mut sites = Vec::new();
    for (s, src) in lf.steps.iter().enumerate() {
        let sub_refs: BTreeSet<usize> = src.args_named(ArgName::Sub).flat_map(|a| a.refs()).collect();
        for &j in &sub_refs {
            if j >= s {
                continue;
            }
            let elsewhere = src.args.iter().any(|a| a.name != ArgName::Sub && a.refs().any(|r| r == j));
            let shared = lf
                .steps
                .iter()
                .enumerate()
                .any(|(k, other)| k != s && other.refs().contains(&j));
            if elsewhere || shared {
                continue;
            }
            if let Some(rule) = rule_for(src, &lf.steps[j], j) {
                sites.push(MergeSite { src: s, dst: j, rule });
            }
        }
    }
    sites
}

fn tokens_named(step: &LogicalFormStep, name: ArgName) -> impl Iterator<Item = &ArgToken> {
    step.args_named(name).flat_map(|a| a.value.iter())
}

fn set_arg(name: ArgName, tokens: BTreeSet<ArgToken>) -> Option<Argument> {
    (!tokens.is_empty()).then(|| Argument::new(name, tokens.into_iter().collect()))
}

fn merged_step(src: &LogicalFormStep, dst: &LogicalFormStep, j: usize, rule: MergeRule) -> LogicalFormStep {
    let not_j = |t: &&ArgToken| **t != ArgToken::Ref(j);
    let mut sub: BTreeSet<ArgToken> = tokens_named(src, ArgName::Sub).filter(not_j).cloned().collect();
    sub.extend(tokens_named(dst, ArgName::Sub).cloned());
    match rule {
        MergeRule::ProjectSubSelect => {
            let mut args: Vec<Argument> = set_arg(ArgName::Sub, sub).into_iter().collect();
            args.extend(src.args.iter().filter(|a| a.name != ArgName::Sub).cloned());
            LogicalFormStep::new(Operator::Project, src.properties.clone(), args)
        }
        MergeRule::FilterSubSelect => {
            sub.extend(tokens_named(src, ArgName::Condition).cloned());
            LogicalFormStep::new(Operator::Select, Vec::new(), set_arg(ArgName::Sub, sub).into_iter().collect())
        }
        MergeRule::FilterSubFilter => {
            let condition: BTreeSet<ArgToken> = tokens_named(src, ArgName::Condition)
                .chain(tokens_named(dst, ArgName::Condition))
                .cloned()
                .collect();
            let args = set_arg(ArgName::Sub, sub)
                .into_iter()
                .chain(set_arg(ArgName::Condition, condition))
                .collect();
            LogicalFormStep::new(Operator::Filter, src.properties.clone(), args)
        }
    }
}

/// Applies one merge: the referrer is replaced by the merged step, the
/// absorbed step is removed, and later references shift down.
pub fn apply_merge(lf: &LogicalForm, provenance: &[Vec<usize>], site: MergeSite) -> (LogicalForm, Vec<Vec<usize>>) {
    let MergeSite { src, dst, rule } = site;
    let merged = merged_step(&lf.steps[src], &lf.steps[dst], dst, rule);
    let shift = |t: &ArgToken| match t {
        ArgToken::Ref(r) if *r > dst => ArgToken::Ref(r - 1),
        other => other.clone(),
    };
    let mut steps = Vec::with_capacity(lf.len() - 1);
    let mut prov = Vec::with_capacity(lf.len() - 1);
    for (i, step) in lf.steps.iter().enumerate() {
        if i == dst {
            continue;
        }
        let step = if i == src { &merged } else { step };
        let args = step
            .args
            .iter()
            .map(|a| Argument::new(a.name, a.value.iter().map(shift).collect()))
            .collect();
        steps.push(LogicalFormStep::new(step.operator, step.properties.clone(), args));
        let mut p = provenance[i].clone();
        if i == src {
            p.extend(provenance[dst].iter().copied());
            p.sort_unstable();
        }
        prov.push(p);
    }
    (LogicalForm::new(steps), prov)
}

/// Merges to a fixed point, always taking the first applicable site.
pub fn merge_steps(lf: &LogicalForm) -> LogicalForm {
    merge_steps_traced(lf).0
}

/// Like [`merge_steps`], also returning which original steps each output
/// step absorbed.
pub fn merge_steps_traced(lf: &LogicalForm) -> (LogicalForm, Vec<Vec<usize>>) {
    let mut cur = lf.clone();
    let mut prov: Vec<Vec<usize>> = (0..lf.len()).map(|i| vec![i]).collect();
    while let Some(site) = merge_sites(&cur).into_iter().next() {
        let (next, p) = apply_merge(&cur, &prov, site);
        cur = next;
        prov = p;
    }
    (cur, prov)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lf(steps: &[&str]) -> LogicalForm {
        LogicalForm::new(steps.iter().map(|s| LogicalFormStep::parse(s).unwrap()).collect())
    }

    #[test]
    fn project_absorbs_select() {
        let out = merge_steps(&lf(&["SELECT[](sub=team)", "PROJECT[](projection=coach head; sub=#1)"]));
        assert_eq!(out.render(), vec!["PROJECT[](projection=coach head; sub=team)"]);
    }

    #[test]
    fn filter_chain_collapses() {
        let (out, prov) = merge_steps_traced(&lf(&[
            "SELECT[](sub=object)",
            "FILTER[](condition=metal; sub=#1)",
            "FILTER[](condition=red; sub=#2)",
        ]));
        assert_eq!(out.render(), vec!["SELECT[](sub=metal object red)"]);
        assert_eq!(prov, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn shared_steps_stay() {
        let input = lf(&[
            "SELECT[](sub=object)",
            "FILTER[](condition=metal; sub=#1)",
            "FILTER[](condition=red; sub=#1)",
        ]);
        let out = merge_steps(&input);
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn unrelated_forms_are_fixed_points() {
        let input = lf(&["SELECT[](sub=cube)", "AGGREGATE[count](arg=#1)"]);
        assert_eq!(merge_steps(&input), input);
    }
}
