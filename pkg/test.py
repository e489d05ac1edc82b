#!/usr/bin/env python
#
# (C) Copyright 2026 opcore contributors
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License version 2 as published
# by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
"""
opcore test runner.

Syntax: test.py [options] [pathname-regexp [test-regexp]]

Test cases are located in the directory tree under src/, in packages named
'tests', in Python modules named 'test*.py'. Every module provides a
test_suite() function; doctests of the doc/ directory are part of those
suites.

A leading "!" in a regexp is stripped and negates the regexp.  Pathname
regexp is applied to the path relative to src/ (opcore/tests/test_x.py).
Test regexp is applied to a full test id (opcore.tests.test_x.Class.test).

Options:
  -h, --help            print this help message
  -v                    verbose (print test names)
  -q                    quiet (do not print anything on success)
  -w                    enable warnings about omitted test cases
  --list-files          list all selected test files
  --list-tests          list all selected test cases
"""

import getopt
import os
import re
import sys
import time
import unittest


class Options(object):
    """Configurable properties of the test runner."""

    basedir = ''                # src/ next to this script, absolute
    pathname_regex = ''
    test_regex = ''
    list_files = False
    list_tests = False
    run_tests = True
    verbosity = 1
    warn_omitted = False


def compile_matcher(regex):
    """Returns a function that takes one argument and returns True or False.

    Empty regex matches everything; a leading "!" reverses the meaning.
    """
    if not regex:
        return lambda x: True
    elif regex == '!':
        return lambda x: False
    elif regex.startswith('!'):
        rx = re.compile(regex[1:])
        return lambda x: rx.search(x) is None
    else:
        rx = re.compile(regex)
        return lambda x: rx.search(x) is not None


def get_test_files(cfg):
    """Returns a sorted list of test module filenames."""
    matcher = compile_matcher(cfg.pathname_regex)
    baselen = len(cfg.basedir) + 1
    results = []
    for dir, dirs, files in os.walk(cfg.basedir):
        dirs[:] = [d for d in dirs if '.' not in d]
        if os.path.basename(dir) != 'tests':
            continue
        if '__init__.py' not in files:
            sys.stderr.write("%s is not a package\n" % dir)
            continue
        for file in files:
            if file.startswith('test') and file.endswith('.py'):
                path = os.path.join(dir, file)
                if matcher(path[baselen:]):
                    results.append(path)
    results.sort()
    return results


def import_module(filename, cfg):
    """Imports and returns a module."""
    filename = os.path.splitext(filename)[0]
    modname = filename[len(cfg.basedir):].replace(os.path.sep, '.')
    modname = modname.lstrip('.')
    mod = __import__(modname)
    for comp in modname.split('.')[1:]:
        mod = getattr(mod, comp)
    return mod


def filter_testsuite(suite, matcher):
    """Returns a flattened list of test cases that match the given matcher."""
    results = []
    for test in suite:
        if isinstance(test, unittest.TestSuite):
            results.extend(filter_testsuite(test, matcher))
        elif matcher(test.id()):
            results.append(test)
    return results


def get_test_classes(suite):
    classes = set()
    for test in suite:
        if isinstance(test, unittest.TestSuite):
            classes.update(get_test_classes(test))
        else:
            classes.add(test.__class__)
    return classes


def get_test_cases(test_files, cfg):
    """Returns a list of test cases from a given list of test modules."""
    matcher = compile_matcher(cfg.test_regex)
    results = []
    started = time.time()
    for file in test_files:
        module = import_module(file, cfg)
        func = getattr(module, 'test_suite', None)
        if func is None:
            sys.stderr.write("\n%s: WARNING: there is no test_suite "
                             "function\n\n" % file)
            continue
        suite = func()
        if cfg.warn_omitted:
            defined = set(item for item in vars(module).values()
                          if isinstance(item, type)
                          and issubclass(item, unittest.TestCase)
                          and item.__name__.endswith('TestCase')
                          and unittest.defaultTestLoader.getTestCaseNames(
                              item))
            for test_class in defined - get_test_classes(suite):
                sys.stderr.write("\n%s: WARNING: %s not in test suite\n\n"
                                 % (file, test_class.__name__))
        results.extend(filter_testsuite(suite, matcher))
    if cfg.run_tests and cfg.verbosity:
        print("Imported %d modules in %.3fs\n" % (
            len(test_files), time.time() - started))
    return results


def main(argv):
    """Main program."""
    cfg = Options()
    cfg.basedir = os.path.abspath(
        os.path.join(os.path.dirname(argv[0]), 'src'))
    try:
        opts, args = getopt.gnu_getopt(argv[1:], 'hvqw',
                                       ['list-files', 'list-tests', 'help'])
    except getopt.error as e:
        sys.stderr.write('%s: %s\nrun %s -h for help\n' % (
            argv[0], e, argv[0]))
        return 1
    for k, v in opts:
        if k in ('-h', '--help'):
            print(__doc__)
            return 0
        elif k == '-v':
            cfg.verbosity += 1
        elif k == '-q':
            cfg.verbosity = 0
        elif k == '-w':
            cfg.warn_omitted = True
        elif k == '--list-files':
            cfg.list_files = True
            cfg.run_tests = False
        elif k == '--list-tests':
            cfg.list_tests = True
            cfg.run_tests = False
    if len(args) > 2:
        sys.stderr.write('%s: too many arguments: %s\n' % (argv[0], args[2]))
        return 1
    if args:
        cfg.pathname_regex = args[0]
    if len(args) > 1:
        cfg.test_regex = args[1]

    sys.path.insert(0, cfg.basedir)
    test_files = get_test_files(cfg)
    if cfg.list_files:
        for file in test_files:
            print(file)
        return 0
    test_cases = get_test_cases(test_files, cfg)
    if cfg.list_tests:
        for test in test_cases:
            print(test.id())
        return 0
    runner = unittest.TextTestRunner(verbosity=cfg.verbosity)
    result = runner.run(unittest.TestSuite(test_cases))
    return not result.wasSuccessful() and 1 or 0


if __name__ == '__main__':
    sys.exit(main(sys.argv))
