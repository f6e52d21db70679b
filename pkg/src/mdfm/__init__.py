"""Multi-decision fusion of per-view ridge classifiers for few-shot episodes."""
