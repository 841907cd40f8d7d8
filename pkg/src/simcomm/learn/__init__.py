"""From-scratch tree learners and cross-validated pair likelihoods."""
from .cv import cross_val_oof, cross_val_oof_all, stratified_folds
from .models import (
    LEARNERS,
    FittedModel,
    LearnerConfig,
    fit_decision_tree,
    fit_gradient_boost,
    fit_model,
    fit_random_forest,
    log_loss,
    model_summary,
    predict_proba,
    vote,
)
from .tree import Tree, build_tree

__all__ = [
    "LEARNERS",
    "FittedModel",
    "LearnerConfig",
    "Tree",
    "build_tree",
    "cross_val_oof",
    "cross_val_oof_all",
    "fit_decision_tree",
    "fit_gradient_boost",
    "fit_model",
    "fit_random_forest",
    "log_loss",
    "model_summary",
    "predict_proba",
    "stratified_folds",
    "vote",
]
