""" Virtual exposure bracketing."""

# License: BSD 3 clause

from ellie.colorspace._checks import check_positive

DEFAULT_GAMMAS = (2.0, 1.0, 0.5)


def make_virtual_exposures(img, gammas=DEFAULT_GAMMAS):
    """Synthesize under-, normal- and over-exposed versions of an image by
    elementwise power curves.

    Parameters
    ----------
    img: tensor
        Image with values in [0, 1].
    gammas: sequence of float, default: (2.0, 1.0, 0.5)
        One exponent per exposure. Each must be greater than 0.

    Returns
    -------
    exposures: list of tensors
        :code:`img ** gamma` for each gamma; values stay in [0, 1].
    """
    for gamma in gammas:
        check_positive(gamma, 'gamma')
    img = img.clamp(0.0, 1.0)
    return [img if gamma == 1 else img.pow(gamma) for gamma in gammas]
