import collections
import warnings


class _Field():
    def __init__(self, name, constructor=None, default=None):
        self.name = name
        self.constructor = constructor
        self.default = default


# Function to produce namedtuple classes.
def _create_class(typename, fields):
    # extract field names
    field_names = [e.name if type(e) is _Field else e for e in fields]

    # extract fields that need conversions
    conversions = [(e.name, e.constructor) for e in fields if type(e) is _Field and e.constructor is not None]

    # extract default values
    defaults = [e.default if type(e) is _Field else None for e in fields]

    # Create the base tuple class, with defaults.
    base = collections.namedtuple(typename, field_names)
    base.__new__.__defaults__ = tuple(defaults)

    class sub(base):
        def __new__(cls, **kwargs):
            # Any unexpected arguments?
            unexpected = set(kwargs.keys()) - set(super(sub, cls)._fields)

            # Remove unexpected arguments and issue warning.
            if unexpected:
                for k in unexpected:
                    del kwargs[k]

                s = ('Unexpected fields for %s: %s'
                     '\nThe record was probably written by a newer version of netresid;'
                     ' the extra fields are ignored.' % (typename, ', '.join(sorted(unexpected))))

                warnings.warn(s, UserWarning)

            for key, func in conversions:
                if kwargs.get(key) is not None:
                    kwargs[key] = func(kwargs[key])

            return super(sub, cls).__new__(cls, **kwargs)

    sub.__name__ = typename
    sub.__qualname__ = typename

    return sub


def _int_keys(d):
    # JSON object keys are always strings
    return {int(k): v for k, v in d.items()}


def _optional_tuple(v):
    return tuple(v)


Hyperparameters = _create_class('Hyperparameters', [
                      _Field('a0', constructor=float, default=1.0),
                      _Field('b0', constructor=float, default=1.0),
                      _Field('c0', constructor=float, default=1.0),
                      _Field('d0', constructor=float, default=1.0),
                      _Field('e0', constructor=float, default=1.0),
                      _Field('k_max', constructor=int, default=10),
                      _Field('p_h0', constructor=float, default=0.5),
                      _Field('model_prior', constructor=_optional_tuple),
                  ])

FitOptions = _create_class('FitOptions', [
                 _Field('tol', constructor=float, default=1e-6),
                 _Field('max_iter', constructor=int, default=500),
                 _Field('n_restarts', constructor=int, default=2),
                 _Field('threads', constructor=int, default=1),
                 _Field('perturbation', constructor=float, default=0.3),
                 _Field('tau_floor', constructor=float, default=1e-10),
             ])

SimConfig = _create_class('SimConfig', [
                'n',
                'rho',
                _Field('lam', constructor=float, default=1.0),
                _Field('d', constructor=int, default=2),
                _Field('beta', constructor=_optional_tuple),
                _Field('seed', default=0),
            ])

FitResult = _create_class('FitResult', [
                _Field('bounds', constructor=_int_keys),
                _Field('posterior', constructor=_int_keys),
                'p_H0',
                'bayes_factor_01',
                _Field('bayes_factor_infinite', default=False),
                _Field('hyper', constructor=lambda h: h if isinstance(h, Hyperparameters) else Hyperparameters(**h)),
                _Field('seeds', constructor=_int_keys),
                _Field('runtimes', constructor=_int_keys),
                _Field('node_ids', constructor=list),
                _Field('n', default=None),
                _Field('d', default=None),
                _Field('density', default=None),
                _Field('covariate_names', constructor=list),
                _Field('manifest', default=None),
            ])

RunManifest = _create_class('RunManifest', [
                  'command',
                  _Field('config', constructor=dict),
                  'seed',
                  'version',
                  _Field('runtimes', constructor=dict),
                  _Field('artifacts', constructor=list),
              ])

GraphonGrid = _create_class('GraphonGrid', [
                  'resolution',
                  'u',
                  'v',
                  'phi_hat',
                  'g_phi_hat',
              ])
