use serde::Serialize;

/// Placeholder that replaces every resolved entity reference in a body.
pub const NAME_TOKEN: &str = "[NAME]";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub count: usize,
}

impl TokenSequence {
    pub fn joined(&self) -> String {
        self.tokens.join(" ")
    }
}

fn clean(raw: &str) -> Option<String> {
    let lower = raw.to_lowercase();
    let bracketed = lower.trim_matches(|c: char| !c.is_alphanumeric() && c != '[' && c != ']');
    // "[NAME]," and "[NAME]'s" both count as the placeholder.
    if bracketed.contains("[name]") {
        return Some(NAME_TOKEN.to_string());
    }
    let word = lower.trim_matches(|c: char| !c.is_alphanumeric());
    (!word.is_empty()).then(|| word.to_string())
}

/// Lowercases, splits on whitespace and strips leading/trailing
/// non-alphanumeric characters from each token. Internal punctuation such as
/// apostrophes and hyphens is kept; pure-punctuation tokens are dropped.
pub fn tokenize(body: &str) -> TokenSequence {
    let tokens: Vec<String> = body.split_whitespace().filter_map(clean).collect();
    TokenSequence { count: tokens.len(), tokens }
}

/// Number of `[NAME]` placeholders in a body.
pub fn count_name_tokens(body: &str) -> usize {
    body.matches(NAME_TOKEN).count()
}
