""" Whole-model structural reparameterization."""

# License: BSD 3 clause

from ellie.errors import ConversionError


def reparameterize_model(model):
    """Replace every node the model's spec marks as reparameterizable with
    its merged single-convolution form.

    Parameters
    ----------
    model: GraphEnhancer
        Model built from a ModelSpec. Its normalization statistics should be
        final (the running estimates are folded in).

    Returns
    -------
    model: GraphEnhancer
        The same object, converted in place, with :code:`model.spec`
        replaced by the inference-form spec.
    """
    spec = getattr(model, 'spec', None)
    if spec is None or not hasattr(model, 'nodes'):
        raise ConversionError("""model was not built from a ModelSpec.""")

    bad = [name for name in spec.reparam_nodes
           if name not in model.nodes or not hasattr(model.nodes[name], 'reparameterize')]
    if bad:
        raise ConversionError(f"""nodes cannot be reparameterized: {', '.join(bad)}.""")

    was_training = model.training
    model.eval()
    for name in spec.reparam_nodes:
        model.nodes[name] = model.nodes[name].reparameterize()
    model.spec = spec.reparameterized()
    model.train(was_training)
    return model
