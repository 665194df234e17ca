"""Minimal estimator plumbing compatible with the scikit-learn parameter protocol.

Estimators here keep constructor arguments as same-named attributes, learn
nothing until ``fit``, and expose learned state through trailing-underscore
attributes, so they compose with tooling that relies on
``get_params``/``set_params`` (cloning, grid search, pipelines).
"""

import inspect


class BaseEstimator:
    @classmethod
    def _param_names(cls):
        init = inspect.signature(cls.__init__)
        return sorted(
            name
            for name, p in init.parameters.items()
            if name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        )

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = self._param_names()
        for key, value in params.items():
            if key not in valid:
                raise ValueError(
                    f"invalid parameter {key!r} for {type(self).__name__}; "
                    f"valid parameters are {valid}"
                )
            setattr(self, key, value)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in sorted(self.get_params().items()))
        return f"{type(self).__name__}({args})"
