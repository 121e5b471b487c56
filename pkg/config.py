import os

# Repository root, used to resolve the bundled data files
BASE_DIR = os.path.dirname(os.path.abspath(__file__))

# Bundled resources
PATHS = {
    "rules": os.path.join(BASE_DIR, "data", "rules.tsv"),          # Negation/uncertainty patterns
    "lexicon": os.path.join(BASE_DIR, "data", "lexicon.tsv"),      # Finding phrases
    "fixture_corpus": os.path.join(BASE_DIR, "data", "fixtures", "corpus.conllu"),
    "fixture_gold": os.path.join(BASE_DIR, "data", "fixtures", "gold.jsonl"),
}

# The 14 finding types, in report order
FINDING_TYPES = [
    "Atelectasis",
    "Cardiomegaly",
    "Consolidation",
    "Edema",
    "Effusion",
    "Emphysema",
    "Fibrosis",
    "Hernia",
    "Infiltration",
    "Mass",
    "Nodule",
    "Pleural Thickening",
    "Pneumonia",
    "Pneumothorax",
]

# Configuration settings
SETTINGS = {
    # Processing settings
    "jobs": 1,                           # Worker threads for per-document detection

    # Matcher settings
    "global_injectivity": False,         # Distinct vertices for all query nodes, not only siblings
    "label_prefix_match": False,         # Let "nmod" also match "nmod:of"

    # Rule categories (switching one off reproduces the ablation experiment)
    "use_negation_rules": True,
    "use_uncertainty_rules": True,

    # Logging settings (overridable by LOG_LEVEL / LOG_FILE)
    "log_level": "INFO",
    "log_file": None,
}

# Surface-window baseline, a trigger/window scheme for comparison runs
SURFACE_BASELINE = {
    # Trigger phrases are lemma sequences
    "negation_triggers": [
        "no",
        "not",
        "without",
        "clear of",
        "free of",
        "negative for",
        "no evidence of",
        "rule out",
    ],
    "post_negation_triggers": [
        "absent",
        "resolve",
    ],
    "uncertainty_triggers": [
        "possible",
        "probable",
        "questionable",
        "suspicious",
        "suspicious for",
        "concern for",
        "may",
        "might",
        "could",
    ],
    "window": 5,                         # Tokens between trigger and mention; None = to sentence end
}
