"""The four regression families behind one fit/predict contract."""
from songmood.regressors.base import (
    DEFAULT_GRIDS,
    DEFAULT_HYPERPARAMETERS,
    FAMILIES,
    RegressorSpec,
    TrainedRegressor,
    fit,
    load_regressor,
    predict,
    save_regressor,
)
from songmood.regressors.grid import GridSearchResult, grid_search, kfold_indices

__all__ = [
    "FAMILIES",
    "DEFAULT_GRIDS",
    "DEFAULT_HYPERPARAMETERS",
    "RegressorSpec",
    "TrainedRegressor",
    "fit",
    "predict",
    "save_regressor",
    "load_regressor",
    "grid_search",
    "kfold_indices",
    "GridSearchResult",
]
