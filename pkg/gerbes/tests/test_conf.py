from fractions import Fraction

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured
from django.test import SimpleTestCase, override_settings

from gerbes.conf import setting


class SettingTests(SimpleTestCase):
    def test_defaults_come_from_the_settings_module(self):
        self.assertEqual(setting('CS_CUBIC_COEFFICIENT'), Fraction(2, 3))
        self.assertEqual(setting('THREADS'), settings.GERBEKIT['THREADS'])

    def test_overridden_settings_are_read_on_every_call(self):
        with override_settings(GERBEKIT={**settings.GERBEKIT, 'CS_CUBIC_COEFFICIENT': '1/3', 'CS_GRID': 12}):
            self.assertEqual(setting('CS_CUBIC_COEFFICIENT'), Fraction(1, 3))
            self.assertEqual(setting('CS_GRID'), 12)
        self.assertEqual(setting('CS_CUBIC_COEFFICIENT'), Fraction(2, 3))

    def test_missing_keys_are_a_configuration_error(self):
        defaults = {k: v for k, v in settings.GERBEKIT.items() if k != 'SEED'}
        with override_settings(GERBEKIT=defaults):
            with self.assertRaises(ImproperlyConfigured):
                setting('SEED')
        with self.assertRaises(ImproperlyConfigured):
            setting('NOT_A_SETTING')
