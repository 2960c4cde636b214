from fractions import Fraction

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured


def setting(name):
    """Read one numerical default from ``settings.GERBEKIT``"""
    try:
        value = settings.GERBEKIT[name]
    except (AttributeError, KeyError):
        raise ImproperlyConfigured(f'GERBEKIT[{name!r}] is not set in the Django settings') from None
    if name == 'CS_CUBIC_COEFFICIENT':
        return Fraction(str(value))
    return value
